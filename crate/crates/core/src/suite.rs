//! Seeded property checks for each axiom, run on the model's exact
//! sequences, and the reports they produce.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{cross_check, n4star_steps, random_splice_triple};
use crate::decompose::{
    assemble, complete_first_morphism_random, decompose_exact, random_exact_with, random_isos,
    random_object, random_pieces, GenParams, Piece,
};
use crate::engine::{
    complete_to_morphism, cone_completion, homotopy_cartesian, n4_from_n4star, random_first_square,
    random_octa_setup, reduced_cone, tr4_octahedron, SearchBudget,
};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded::GradedMap;
use crate::linsys::{LinearSystem, Term};
use crate::rng::{derive_named, rng_from};
use crate::sequence::{direct_sum_seq, mapping_cone, trivial_seq, NSeq, SeqMorphism};
use crate::text::{print_one, print_seqs, Item};

/// Exhaustive search cap for the connecting map of a cartesian square.
pub const CARTESIAN_BUDGET: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub n: usize,
    pub prime: u32,
    pub trials: usize,
    pub max_dim: usize,
    pub degree_lo: i64,
    pub degree_hi: i64,
    pub seed: u64,
}

impl SuiteParams {
    pub fn new(n: usize, prime: u32) -> Self {
        Self {
            n,
            prime,
            trials: 100,
            max_dim: 3,
            degree_lo: -2,
            degree_hi: 2,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::Invalid(format!(
                "n must be at least 3, got {}",
                self.n
            )));
        }
        if self.max_dim == 0 {
            return Err(Error::Invalid("dimension bound must be positive".into()));
        }
        if self.degree_lo > self.degree_hi {
            return Err(Error::Invalid("empty degree window".into()));
        }
        PrimeField::new(self.prime)?;
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.prime).expect("validated")
    }

    pub fn gen(&self) -> GenParams {
        GenParams {
            n: self.n,
            shift: 1,
            max_dim: self.max_dim,
            degree_lo: self.degree_lo,
            degree_hi: self.degree_hi,
            pieces: 4,
        }
    }

    fn with_n(&self, n: usize) -> Self {
        Self { n, ..*self }
    }
}

/// One trial of one check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub check: String,
    pub n: usize,
    pub prime: u32,
    pub trial: usize,
    pub seed: u64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub n: usize,
    pub prime: u32,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    /// Trial indices with a serialized witness.
    pub witnesses: Vec<usize>,
}

/// What the checks take for granted about the model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFlags {
    pub semisimple: bool,
    pub suspension_is_degree_shift: bool,
    pub exactness_is_degreewise: bool,
    pub canonical_completions: bool,
    /// The good-completion axiom is checked on instances, not proved.
    pub cone_axiom_empirical: bool,
}

impl Default for ModelFlags {
    fn default() -> Self {
        Self {
            semisimple: true,
            suspension_is_degree_shift: true,
            exactness_is_degreewise: true,
            canonical_completions: true,
            cone_axiom_empirical: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub model: ModelFlags,
    pub checks: Vec<CheckSummary>,
    pub records: Vec<TrialRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line {
    Model(ModelFlags),
    Trial(TrialRecord),
    Summary(CheckSummary),
}

impl Report {
    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.records.extend(other.records);
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.failures() == 0
    }

    pub fn summary<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a CheckSummary> + 'a {
        self.checks.iter().filter(move |c| c.check == check)
    }

    fn all_pass(&self, names: &[&str]) -> bool {
        names
            .iter()
            .all(|n| self.summary(n).all(|c| c.failures == 0))
    }

    /// Both axiom systems agree on the model: `(N1)+(N2)+(N3)` passes
    /// exactly when `(N1*)+(N2*)+(N3)` does.
    pub fn axiom_systems_agree(&self) -> bool {
        self.all_pass(&["N1", "N2", "N3"]) == self.all_pass(&["N1*", "N2*", "N3"])
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<14} {:>2} {:>5} {:>7} {:>7} {:>8}\n",
            "check", "n", "p", "trials", "passes", "failures"
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<14} {:>2} {:>5} {:>7} {:>7} {:>8}\n",
                c.check, c.n, c.prime, c.trials, c.passes, c.failures
            ));
        }
        for r in self.records.iter().filter(|r| !r.pass) {
            out.push_str(&format!(
                "\nFAIL {} n={} p={} trial={} seed={}: {}\n",
                r.check,
                r.n,
                r.prime,
                r.trial,
                r.seed,
                r.error.as_deref().unwrap_or("")
            ));
            if let Some(w) = &r.witness {
                out.push_str(w);
            }
        }
        out.push_str(&format!(
            "\naxiom systems agree: {}\nresult: {} ({} failures)\n",
            self.axiom_systems_agree(),
            if self.is_clean() { "PASS" } else { "FAIL" },
            self.failures()
        ));
        out
    }

    /// One JSON object per line: the model flags, every trial, every summary.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let mut push = |l: &Line| {
            out.push_str(&serde_json::to_string(l).expect("plain data"));
            out.push('\n');
        };
        push(&Line::Model(self.model.clone()));
        for r in &self.records {
            push(&Line::Trial(r.clone()));
        }
        for c in &self.checks {
            push(&Line::Summary(c.clone()));
        }
        out
    }

    pub fn from_json_lines(src: &str) -> Result<Report> {
        let mut report = Report::default();
        for (i, line) in src
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let parsed: Line = serde_json::from_str(line).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            match parsed {
                Line::Model(m) => report.model = m,
                Line::Trial(t) => report.records.push(t),
                Line::Summary(s) => report.checks.push(s),
            }
        }
        Ok(report)
    }
}

fn failure_parts(e: &Error) -> (String, Option<String>) {
    match e {
        Error::Verification(f) => (f.to_string(), Some(f.diagram.clone())),
        other => (other.to_string(), None),
    }
}

fn ensure(cond: bool, check: &str, identity: &str, seqs: &[(&str, &NSeq)]) -> Result<()> {
    if cond {
        return Ok(());
    }
    let diagram = match seqs.first() {
        Some((_, s)) => print_seqs(s.field(), seqs),
        None => String::new(),
    };
    Err(Error::verification(check, identity, None, diagram))
}

type Outcome = (Result<()>, Option<String>);

fn run_trials(
    name: &str,
    params: &SuiteParams,
    trial: impl Fn(&SuiteParams, u64) -> Outcome + Sync,
) -> Report {
    let records: Vec<TrialRecord> = (0..params.trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_named(params.seed, name, i as u64);
            let (res, minimized) = trial(params, seed);
            let (error, witness) = match res {
                Ok(()) => (None, None),
                Err(e) => {
                    let (msg, diagram) = failure_parts(&e);
                    (Some(msg), minimized.or(diagram))
                }
            };
            TrialRecord {
                check: name.to_string(),
                n: params.n,
                prime: params.prime,
                trial: i,
                seed,
                pass: error.is_none(),
                error,
                witness,
            }
        })
        .collect();
    let passes = records.iter().filter(|r| r.pass).count();
    let summary = CheckSummary {
        check: name.to_string(),
        n: params.n,
        prime: params.prime,
        trials: params.trials,
        passes,
        failures: params.trials - passes,
        witnesses: records
            .iter()
            .filter(|r| r.witness.is_some())
            .map(|r| r.trial)
            .collect(),
    };
    Report {
        model: ModelFlags::default(),
        checks: vec![summary],
        records,
    }
}

/// A generated exact sequence: pieces summed, then conjugated by
/// automorphisms drawn from `iso_seed`.
fn build(field: PrimeField, g: &GenParams, pieces: &[Piece], iso_seed: u64) -> Result<NSeq> {
    let sum = assemble(field, g.n, g.shift, pieces)?;
    let isos = random_isos(&sum, &mut rng_from(iso_seed));
    sum.conjugate(&isos)
}

/// Drops pieces one at a time while the property still fails.
pub fn minimize(
    field: PrimeField,
    g: &GenParams,
    mut pieces: Vec<Piece>,
    iso_seed: u64,
    fails: impl Fn(&NSeq) -> bool,
) -> Result<NSeq> {
    'outer: loop {
        for i in 0..pieces.len() {
            let mut cand = pieces.clone();
            cand.remove(i);
            if fails(&build(field, g, &cand, iso_seed)?) {
                pieces = cand;
                continue 'outer;
            }
        }
        return build(field, g, &pieces, iso_seed);
    }
}

/// Runs a property of one generated exact sequence, minimizing on failure.
fn sequence_trial(
    params: &SuiteParams,
    seed: u64,
    prop: impl Fn(&NSeq, &mut ChaCha8Rng) -> Result<()>,
) -> Outcome {
    let field = params.field();
    let g = params.gen();
    let mut rng = rng_from(seed);
    let pieces = random_pieces(&g, &mut rng);
    let iso_seed: u64 = rng.gen();
    let prop_seed: u64 = rng.gen();
    let s = match build(field, &g, &pieces, iso_seed) {
        Ok(s) => s,
        Err(e) => return (Err(e), None),
    };
    match prop(&s, &mut rng_from(prop_seed)) {
        Ok(()) => (Ok(()), None),
        Err(e) => {
            let fails = |t: &NSeq| prop(t, &mut rng_from(prop_seed)).is_err();
            let witness = minimize(field, &g, pieces, iso_seed, fails).ok().map(|m| {
                format!(
                    "{}{}",
                    failure_parts(&e).1.unwrap_or_default(),
                    print_one(field, "minimal", Item::Seq(m))
                )
            });
            (Err(e), witness)
        }
    }
}

/// Replaces one entry of one nonempty block by a different value.
pub fn corrupt<R: Rng + ?Sized>(s: &NSeq, rng: &mut R) -> Option<NSeq> {
    let field = s.field();
    let candidates: Vec<(usize, i64)> = s
        .maps()
        .iter()
        .enumerate()
        .flat_map(|(i, m)| {
            m.blocks()
                .iter()
                .filter(|(_, b)| b.rows() * b.cols() > 0)
                .map(move |(&d, _)| (i, d))
        })
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let (i, d) = candidates[rng.gen_range(0..candidates.len())];
    let m = &s.maps()[i];
    let mut block = m.block(d);
    let (r, c) = (
        rng.gen_range(0..block.rows()),
        rng.gen_range(0..block.cols()),
    );
    let bump = rng.gen_range(1..field.p());
    block.set(r, c, field.add(block.get(r, c), bump));
    let mut blocks = m.blocks().clone();
    blocks.insert(d, block);
    let new = GradedMap::from_blocks(field, m.source(), m.target(), blocks).ok()?;
    let mut maps = s.maps().to_vec();
    maps[i] = new;
    NSeq::new(field, s.shift(), s.objects().to_vec(), maps).ok()
}

/// Exact, corrupted-exact, or entirely random sequences in equal measure.
pub fn random_mixed<R: Rng + ?Sized>(
    field: PrimeField,
    g: &GenParams,
    rng: &mut R,
) -> Result<NSeq> {
    let s = random_exact_with(field, g, rng)?;
    match rng.gen_range(0..3) {
        0 => Ok(s),
        1 => Ok(corrupt(&s, rng).unwrap_or(s)),
        _ => {
            let objects: Vec<_> = (0..g.n).map(|_| random_object(g, rng)).collect();
            let maps = (0..g.n)
                .map(|i| {
                    let tgt = if i + 1 < g.n {
                        objects[i + 1].clone()
                    } else {
                        objects[0].shift(g.shift)
                    };
                    GradedMap::random(field, &objects[i], &tgt, rng)
                })
                .collect();
            NSeq::new(field, g.shift, objects, maps)
        }
    }
}

pub fn check_n1(params: &SuiteParams) -> Report {
    run_trials("N1", params, |p, seed| {
        sequence_trial(p, seed, |s, rng| {
            let field = s.field();
            let g = p.gen();
            let t = random_exact_with(field, &g, rng)?;
            let sum = direct_sum_seq(s, &t)?;
            ensure(
                sum.is_exact(),
                "N1",
                "direct sums of exact sequences are exact",
                &[("sum", &sum)],
            )?;
            let conj = s.conjugate(&random_isos(s, rng))?;
            ensure(
                conj.is_exact(),
                "N1",
                "isomorphic copies are exact",
                &[("copy", &conj)],
            )?;
            let dec = decompose_exact(s)?;
            for piece in &dec.pieces {
                let tr = trivial_seq(field, s.n(), s.shift(), &piece.object, piece.rotation)?;
                ensure(
                    tr.is_exact(),
                    "N1",
                    "summands are exact",
                    &[("summand", &tr)],
                )?;
            }
            ensure(
                dec.iso.source.conjugate(&dec.iso.components)? == *s,
                "N1",
                "decomposition reconstructs the input",
                &[("input", s)],
            )?;
            let x = random_object(&g, rng);
            let tr = trivial_seq(field, s.n(), s.shift(), &x, 0)?;
            ensure(
                tr.is_exact(),
                "N1",
                "trivial sequences are exact",
                &[("trivial", &tr)],
            )?;
            let y = random_object(&g, rng);
            let alpha = GradedMap::random(field, &x, &y, rng);
            let comp = complete_first_morphism_random(&alpha, s.n(), s.shift(), rng)?;
            ensure(
                comp.is_exact() && comp.map(1) == &alpha,
                "N1",
                "every map starts an exact sequence",
                &[("completion", &comp)],
            )?;
            let zero = NSeq::zero(field, s.n(), s.shift());
            ensure(
                zero.is_exact(),
                "N1",
                "the zero sequence is exact",
                &[("zero", &zero)],
            )
        })
    })
}

/// A weak isomorphism `s → t`: an isomorphism plus a morphism vanishing at
/// positions `n` and `1`, so that `φₙ` and `Σφ₁` stay invertible. Callers
/// rotate the input first to move the invertible pair around.
pub fn random_weak_iso<R: Rng + ?Sized>(s: &NSeq, rng: &mut R) -> Result<SeqMorphism> {
    let field = s.field();
    let n = s.n();
    let thetas = random_isos(s, rng);
    let t = s.conjugate(&thetas)?;
    let mut sys = LinearSystem::new(field);
    // Unknown ν_k for 2 ≤ k ≤ n-1 (1-based); ν₁ = νₙ = 0.
    let var = |k: usize| (2..n).contains(&k).then(|| k - 2);
    for k in 2..n {
        sys.unknown(s.obj(k), t.obj(k));
    }
    for k in 1..n {
        // ν_{k+1}∘α_k = β_k∘ν_k
        let mut terms = Vec::new();
        if let Some(v) = var(k + 1) {
            terms.push(Term::var(v).right(s.map(k)));
        }
        if let Some(v) = var(k) {
            terms.push(Term::var(v).left(t.map(k)).negated());
        }
        if !terms.is_empty() {
            sys.homogeneous(terms, s.obj(k), t.obj(k + 1))?;
        }
    }
    let nu = sys.solution_space()?.expect("homogeneous").sample(rng);
    let components = (1..=n)
        .map(|k| match var(k) {
            Some(v) => thetas[k - 1].add(&nu[v]),
            None => Ok(thetas[k - 1].clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    SeqMorphism::new(s.clone(), t, components)
}

pub fn check_n1_star(params: &SuiteParams) -> Report {
    run_trials("N1*", params, |p, seed| {
        sequence_trial(p, seed, |s, rng| {
            let s = &s.rotate_left_by(rng.gen_range(0..s.n()));
            let w = random_weak_iso(s, rng)?;
            ensure(
                w.is_morphism(),
                "N1*",
                "perturbed map is a morphism",
                &[("source", s), ("target", &w.target)],
            )?;
            ensure(
                w.is_weak_iso()?,
                "N1*",
                "perturbed map is a weak isomorphism",
                &[("source", s)],
            )?;
            ensure(
                w.target.is_exact(),
                "N1*",
                "target of a weak isomorphism is exact",
                &[("source", s), ("target", &w.target)],
            )?;
            let field = s.field();
            let x = random_object(&p.gen(), rng);
            let tr = trivial_seq(field, s.n(), s.shift(), &x, 0)?;
            ensure(
                tr.is_exact(),
                "N1*",
                "trivial sequences are exact",
                &[("trivial", &tr)],
            )
        })
    })
}

pub fn check_n2(params: &SuiteParams) -> Report {
    run_trials("N2", params, |p, seed| {
        let mut rng = rng_from(seed);
        let mut run = || -> Result<()> {
            let s = random_mixed(p.field(), &p.gen(), &mut rng)?;
            let (l, r) = (s.rotate_left(), s.rotate_right());
            ensure(
                s.is_exact() == l.is_exact() && s.is_exact() == r.is_exact(),
                "N2",
                "exact iff its rotations are exact",
                &[("input", &s)],
            )?;
            ensure(
                l.rotate_right() == s && r.rotate_left() == s,
                "N2",
                "left and right rotation are inverse",
                &[("input", &s)],
            )
        };
        (run(), None)
    })
}

pub fn check_n2_star(params: &SuiteParams) -> Report {
    run_trials("N2*", params, |p, seed| {
        sequence_trial(p, seed, |s, _| {
            let l = s.rotate_left();
            ensure(
                l.is_exact(),
                "N2*",
                "left rotation of an exact sequence is exact",
                &[("input", s)],
            )?;
            let n = s.n();
            let full = s.rotate_left_by(n);
            let expected = s.shifted(s.shift()).signed(n as i64);
            ensure(
                full == expected,
                "N2*",
                "n-fold rotation is (−1)ⁿΣ",
                &[("input", s), ("rotated", &full)],
            )?;
            let signs_visible =
                s.field().p() != 2 && n % 2 == 1 && s.maps().iter().any(|m| !m.is_zero());
            if signs_visible {
                ensure(
                    full != s.shifted(s.shift()),
                    "N2*",
                    "the sign of the n-fold rotation is visible",
                    &[("input", s)],
                )?;
            }
            Ok(())
        })
    })
}

fn random_pair(
    p: &SuiteParams,
    rng: &mut ChaCha8Rng,
) -> Result<(NSeq, NSeq, GradedMap, GradedMap)> {
    let g = p.gen();
    let s = random_exact_with(p.field(), &g, rng)?;
    let t = random_exact_with(p.field(), &g, rng)?;
    let (p1, p2) = random_first_square(&s, &t, rng)?;
    Ok((s, t, p1, p2))
}

pub fn check_n3(params: &SuiteParams) -> Report {
    run_trials("N3", params, |p, seed| {
        let run = || -> Result<()> {
            let (s, t, p1, p2) = random_pair(p, &mut rng_from(seed))?;
            let m = complete_to_morphism(&s, &t, &p1, &p2)?;
            ensure(
                m.is_morphism() && m.components[0] == p1 && m.components[1] == p2,
                "N3",
                "completion is a morphism extending the square",
                &[("source", &s), ("target", &t)],
            )
        };
        (run(), None)
    })
}

pub fn check_n4(params: &SuiteParams) -> Report {
    run_trials("N4", params, |p, seed| {
        let run = || -> Result<()> {
            let (s, t, p1, p2) = random_pair(p, &mut rng_from(seed))?;
            let (m, cone) = cone_completion(&s, &t, &p1, &p2)?;
            ensure(
                m.is_morphism() && cone == mapping_cone(&m)? && cone.is_exact(),
                "N4",
                "mapping cone of the completion is exact",
                &[("source", &s), ("target", &t), ("cone", &cone)],
            )
        };
        (run(), None)
    })
}

/// The reduced cone of a completion with identity first component, and the
/// cartesian witness for its ladder.
pub fn check_reduced_cone(params: &SuiteParams) -> Report {
    run_trials("reduced-cone", params, |p, seed| {
        let run = || -> Result<()> {
            let mut rng = rng_from(seed);
            let setup = random_octa_setup(p.field(), &p.gen(), &mut rng)?;
            let (a, b) = (&setup.a, &setup.b);
            let id = GradedMap::identity(p.field(), a.obj(1));
            let (m, _) = cone_completion(a, b, &id, &setup.phi2)?;
            let r = reduced_cone(&m)?;
            ensure(
                r.is_exact(),
                "reduced-cone",
                "reduced cone is exact",
                &[("reduced", &r)],
            )?;
            let n = a.n();
            let a_maps: Vec<_> = (2..n).map(|i| a.map(i).clone()).collect();
            let b_maps: Vec<_> = (2..n).map(|i| b.map(i).clone()).collect();
            let phis: Vec<_> = m.components[1..].to_vec();
            let w = homotopy_cartesian(
                p.field(),
                a.shift(),
                &a_maps,
                &b_maps,
                &phis,
                CARTESIAN_BUDGET,
            )?;
            ensure(
                w.is_some(),
                "reduced-cone",
                "ladder is homotopy cartesian",
                &[("reduced", &r)],
            )
        };
        (run(), None)
    })
}

pub fn check_n4_star(params: &SuiteParams) -> Report {
    run_trials("N4*", params, |p, seed| {
        let run = || -> Result<()> {
            let mut rng = rng_from(seed);
            let setup = random_octa_setup(p.field(), &p.gen(), &mut rng)?;
            let (a, b, c) = (&setup.a, &setup.b, &setup.c);
            let o = crate::engine::higher_octahedron(a, b, c, &setup.phi2)?;
            let n = a.n();
            let relation =
                c.map(n).compose(o.psi(2 * n - 5))? == a.susp(a.map(1)).compose(b.map(n))?;
            ensure(
                o.morphism.is_morphism() && o.gamma_seq.is_exact() && relation,
                "N4*",
                "both properties of the higher octahedron",
                &[("A", a), ("B", b), ("C", c), ("gamma", &o.gamma_seq)],
            )?;
            let (s, t, p1, p2) = random_pair(p, &mut rng)?;
            let out = n4_from_n4star(&s, &t, &p1, &p2)?;
            ensure(
                out.cone == mapping_cone(&out.morphism)? && out.cone.is_exact(),
                "N4*",
                "converse construction yields an exact mapping cone",
                &[("source", &s), ("target", &t), ("cone", &out.cone)],
            )
        };
        (run(), None)
    })
}

/// Always runs at n = 3, whatever `params.n` is.
pub fn check_tr4(params: &SuiteParams) -> Report {
    let p3 = params.with_n(3);
    run_trials("TR4", &p3, |p, seed| {
        let run = || -> Result<()> {
            let mut rng = rng_from(seed);
            let setup = random_octa_setup(p.field(), &p.gen(), &mut rng)?;
            let (a, b, c) = (&setup.a, &setup.b, &setup.c);
            let o = tr4_octahedron(a, b, c, &setup.phi2)?;
            let w = homotopy_cartesian(
                p.field(),
                a.shift(),
                &[a.map(2).clone()],
                &[b.map(2).clone()],
                &[setup.phi2.clone(), o.phi(3).clone()],
                CARTESIAN_BUDGET,
            )?;
            ensure(
                w.is_some(),
                "TR4",
                "the φ₂ square is homotopy cartesian",
                &[("A", a), ("B", b)],
            )
        };
        (run(), None)
    })
}

/// Step-by-step check on spliced 4-angles; runs at n = 4 whatever
/// `params.n` is.
pub fn check_cluster(params: &SuiteParams) -> Report {
    let p4 = params.with_n(4);
    run_trials("cluster-N4*", &p4, |p, seed| {
        let run = || -> Result<()> {
            let mut rng = rng_from(seed);
            let g = GenParams {
                max_dim: p.max_dim.min(2),
                ..p.gen()
            };
            let t = random_splice_triple(p.field(), &g, &mut rng)?;
            let out = n4star_steps(
                &t.a,
                &t.b,
                &t.c,
                &t.phi2,
                SearchBudget {
                    candidates: 256,
                    seed,
                },
            )?;
            ensure(
                cross_check(&t, &out)?,
                "cluster-N4*",
                "agrees with the general construction up to isomorphism",
                &[("gamma", &out.octa.gamma_seq)],
            )
        };
        (run(), None)
    })
}

type CheckFn = fn(&SuiteParams) -> Report;

/// Every check for one `(n, p)`; the n = 3 and n = 4 specific checks run
/// once, for the matching `n`.
pub fn run_all(params: &SuiteParams) -> Result<Report> {
    params.validate()?;
    let mut checks: Vec<CheckFn> = vec![
        check_n1,
        check_n1_star,
        check_n2,
        check_n2_star,
        check_n3,
        check_n4,
        check_reduced_cone,
        check_n4_star,
    ];
    if params.n == 3 {
        checks.push(check_tr4);
    }
    if params.n == 4 {
        checks.push(check_cluster);
    }
    let parts: Vec<Report> = checks.par_iter().map(|c| c(params)).collect();
    let mut report = Report::default();
    for part in parts {
        report.merge(part);
    }
    Ok(report)
}

/// Exactness and rotation checks on sequences read from a file.
pub fn check_sequences(seqs: &[(String, NSeq)]) -> Report {
    let records: Vec<TrialRecord> = seqs
        .iter()
        .enumerate()
        .map(|(i, (label, s))| {
            let error = match s.exactness_defect() {
                Some((pos, deg)) => Some(format!(
                    "{label}: not exact at position {pos}, degree {deg}"
                )),
                None if !s.rotate_left().is_exact() => {
                    Some(format!("{label}: left rotation is not exact"))
                }
                None => None,
            };
            TrialRecord {
                check: "input".into(),
                n: s.n(),
                prime: s.field().p(),
                trial: i,
                seed: 0,
                pass: error.is_none(),
                witness: error
                    .as_ref()
                    .map(|_| print_one(s.field(), label, Item::Seq(s.clone()))),
                error,
            }
        })
        .collect();
    let passes = records.iter().filter(|r| r.pass).count();
    let checks = vec![CheckSummary {
        check: "input".into(),
        n: seqs.first().map_or(0, |(_, s)| s.n()),
        prime: seqs.first().map_or(0, |(_, s)| s.field().p()),
        trials: records.len(),
        passes,
        failures: records.len() - passes,
        witnesses: records
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.trial)
            .collect(),
    }];
    Report {
        model: ModelFlags::default(),
        checks,
        records,
    }
}
