use std::fs;
use std::path::Path;

use nangle_core::cluster::{
    cross_check, n4star_steps, random_splice_triple, Splice4, SpliceTriple,
};
use nangle_core::decompose::{random_exact, GenParams};
use nangle_core::engine::{
    cone_completion, higher_octahedron, n4_from_n4star, random_first_square, random_octa_setup,
    tr4_octahedron, SearchBudget,
};
use nangle_core::field::DEFAULT_PRIME;
use nangle_core::rng::rng_from;
use nangle_core::suite::{check_sequences, run_all, Report, SuiteParams};
use nangle_core::text::{parse, print, Bundle, Document, Item};
use nangle_core::{mapping_cone, Error, GradedMap, NSeq, PrimeField, SeqMorphism};
use thiserror::Error as ThisError;

use crate::{Cli, Command, Direction, Format, Kind};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] Error),
    /// A postcondition failed; the witness has been written out.
    #[error("verification failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_)
            | CliError::Core(
                Error::Verification(_)
                | Error::NotExact { .. }
                | Error::NotMorphism(_)
                | Error::NoSolution(_)
                | Error::BudgetExceeded(_),
            ) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    if cli.format == Format::Jsonl && !matches!(cli.command, Command::Check) {
        return Err(CliError::Usage(
            "--format jsonl applies to check only".into(),
        ));
    }
    match &cli.command {
        Command::Gen { kind, pieces } => gen(cli, *kind, *pieces),
        Command::Rotate { direction, times } => rotate(cli, *direction, *times),
        Command::Cone => cone(cli),
        Command::Complete => complete(cli),
        Command::Octa { converse } => octa(cli, *converse),
        Command::Cluster4 => cluster4(cli),
        Command::Check => check(cli),
    }
}

fn field(cli: &Cli) -> Result<PrimeField> {
    Ok(PrimeField::new(cli.prime.unwrap_or(DEFAULT_PRIME))?)
}

fn gen_params(cli: &Cli, n: usize, pieces: usize) -> Result<GenParams> {
    if n < 3 {
        return Err(CliError::Usage(format!("--n must be at least 3, got {n}")));
    }
    if cli.degree_lo > cli.degree_hi {
        return Err(CliError::Usage("--degree-lo exceeds --degree-hi".into()));
    }
    Ok(GenParams {
        n,
        shift: 1,
        max_dim: cli.max_dim,
        degree_lo: cli.degree_lo,
        degree_hi: cli.degree_hi,
        pieces,
    })
}

fn read_doc(cli: &Cli) -> Result<Document> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --in".into()))?;
    let src = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse(&src)?)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes the failure's diagram where the output would have gone.
fn fail_with_witness(cli: &Cli, e: Error) -> CliError {
    if let Error::Verification(f) = &e {
        let _ = emit(cli, &f.diagram);
    }
    CliError::Core(e)
}

fn get_seq<'a>(doc: &'a Document, label: &str) -> Result<&'a NSeq> {
    match doc.get(label) {
        Some(Item::Seq(s)) => Ok(s),
        _ => Err(CliError::Usage(format!(
            "input has no sequence labelled {label}"
        ))),
    }
}

fn get_map<'a>(doc: &'a Document, label: &str) -> Option<&'a GradedMap> {
    match doc.get(label) {
        Some(Item::Map(m)) => Some(m),
        _ => None,
    }
}

fn get_splice(doc: &Document, label: &str) -> Result<Splice4> {
    match doc.get(label) {
        Some(Item::Bundle(b)) => Ok(Splice4::from_bundle(b)?),
        _ => Err(CliError::Usage(format!(
            "input has no splice4 bundle labelled {label}"
        ))),
    }
}

fn gen(cli: &Cli, kind: Kind, pieces: usize) -> Result<()> {
    let f = field(cli)?;
    let mut rng = rng_from(cli.seed);
    let doc = match kind {
        Kind::Seq => {
            let g = gen_params(cli, cli.n.unwrap_or(4), pieces)?;
            Document::new(f).with("seq", Item::Seq(random_exact(f, &g, cli.seed)?))
        }
        Kind::Pair => {
            let g = gen_params(cli, cli.n.unwrap_or(4), pieces)?;
            let s = random_exact(f, &g, cli.seed)?;
            let t = random_exact(f, &g, cli.seed.wrapping_add(1))?;
            let (p1, p2) = random_first_square(&s, &t, &mut rng)?;
            Document::new(f)
                .with("source", Item::Seq(s))
                .with("target", Item::Seq(t))
                .with("phi1", Item::Map(p1))
                .with("phi2", Item::Map(p2))
        }
        Kind::Octa => {
            let g = gen_params(cli, cli.n.unwrap_or(4), pieces)?;
            let s = random_octa_setup(f, &g, &mut rng)?;
            Document::new(f)
                .with("a", Item::Seq(s.a))
                .with("b", Item::Seq(s.b))
                .with("c", Item::Seq(s.c))
                .with("phi2", Item::Map(s.phi2))
        }
        Kind::Splice => {
            if cli.n.is_some_and(|n| n != 4) {
                return Err(CliError::Usage("spliced 4-angles have n = 4".into()));
            }
            let g = gen_params(cli, 4, pieces)?;
            let t = random_splice_triple(f, &g, &mut rng)?;
            Document::new(f)
                .with("a", Item::Bundle(t.a.to_bundle()))
                .with("b", Item::Bundle(t.b.to_bundle()))
                .with("c", Item::Bundle(t.c.to_bundle()))
                .with("phi2", Item::Map(t.phi2))
        }
    };
    emit(cli, &print(&doc))
}

fn rotate(cli: &Cli, direction: Direction, times: usize) -> Result<()> {
    let doc = read_doc(cli)?;
    let mut out = Document::new(doc.field);
    for (label, s) in doc.seqs() {
        let mut r = s.clone();
        for _ in 0..times {
            r = match direction {
                Direction::Left => r.rotate_left(),
                Direction::Right => r.rotate_right(),
            };
        }
        let mut back = r.clone();
        for _ in 0..times {
            back = match direction {
                Direction::Left => back.rotate_right(),
                Direction::Right => back.rotate_left(),
            };
        }
        if back != *s || r.is_exact() != s.is_exact() {
            let _ = emit(
                cli,
                &print(&Document::new(doc.field).with(label, Item::Seq(s.clone()))),
            );
            return Err(CliError::Failed(format!(
                "rotation of {label} is inconsistent"
            )));
        }
        out.push(label, Item::Seq(r));
    }
    emit(cli, &print(&out))
}

fn cone(cli: &Cli) -> Result<()> {
    let doc = read_doc(cli)?;
    let m: &SeqMorphism = doc
        .items
        .iter()
        .find_map(|(_, i)| match i {
            Item::Morphism(m) => Some(m),
            _ => None,
        })
        .ok_or_else(|| CliError::Usage("input has no morphism".into()))?;
    if let Some(i) = m.failing_square() {
        return Err(CliError::Core(Error::NotMorphism(i)));
    }
    let c = mapping_cone(m)?;
    let text = print(&Document::new(doc.field).with("cone", Item::Seq(c.clone())));
    emit(cli, &text)?;
    match c.exactness_defect() {
        None => Ok(()),
        Some((p, d)) => Err(CliError::Failed(format!(
            "cone is not exact at position {p}, degree {d}"
        ))),
    }
}

fn complete(cli: &Cli) -> Result<()> {
    let doc = read_doc(cli)?;
    let s = get_seq(&doc, "source")?;
    let t = get_seq(&doc, "target")?;
    let (p1, p2) = match (get_map(&doc, "phi1"), get_map(&doc, "phi2")) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => random_first_square(s, t, &mut rng_from(cli.seed))?,
    };
    let (m, _) = cone_completion(s, t, &p1, &p2).map_err(|e| fail_with_witness(cli, e))?;
    emit(
        cli,
        &print(&Document::new(doc.field).with("completion", Item::Morphism(m))),
    )
}

fn octa(cli: &Cli, converse: bool) -> Result<()> {
    let doc = read_doc(cli)?;
    if converse {
        let s = get_seq(&doc, "source")?;
        let t = get_seq(&doc, "target")?;
        let (p1, p2) = match (get_map(&doc, "phi1"), get_map(&doc, "phi2")) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(CliError::Usage("converse needs maps phi1 and phi2".into())),
        };
        let out = n4_from_n4star(s, t, p1, p2).map_err(|e| fail_with_witness(cli, e))?;
        let d = Document::new(doc.field)
            .with("completion", Item::Morphism(out.morphism))
            .with("cone", Item::Seq(out.cone));
        return emit(cli, &print(&d));
    }
    let (a, b, c) = (
        get_seq(&doc, "a")?,
        get_seq(&doc, "b")?,
        get_seq(&doc, "c")?,
    );
    let phi2 =
        get_map(&doc, "phi2").ok_or_else(|| CliError::Usage("input has no map phi2".into()))?;
    let o = if a.n() == 3 {
        tr4_octahedron(a, b, c, phi2)
    } else {
        higher_octahedron(a, b, c, phi2)
    }
    .map_err(|e| fail_with_witness(cli, e))?;
    let mut bundle = Bundle::new("octa").seq("gamma", &o.gamma_seq);
    for (i, p) in o.phis.iter().enumerate() {
        bundle = bundle.map(&format!("phi{}", i + 3), p);
    }
    for (j, p) in o.psis.iter().enumerate() {
        bundle = bundle.map(&format!("psi{}", j + 1), p);
    }
    emit(
        cli,
        &print(&Document::new(doc.field).with("octa", Item::Bundle(bundle))),
    )
}

fn cluster4(cli: &Cli) -> Result<()> {
    let doc = read_doc(cli)?;
    let t = SpliceTriple {
        a: get_splice(&doc, "a")?,
        b: get_splice(&doc, "b")?,
        c: get_splice(&doc, "c")?,
        phi2: get_map(&doc, "phi2")
            .ok_or_else(|| CliError::Usage("input has no map phi2".into()))?
            .clone(),
    };
    let budget = SearchBudget {
        seed: cli.seed,
        ..SearchBudget::default()
    };
    let out =
        n4star_steps(&t.a, &t.b, &t.c, &t.phi2, budget).map_err(|e| fail_with_witness(cli, e))?;
    if !cross_check(&t, &out)? {
        let _ = emit(
            cli,
            &print(&Document::new(doc.field).with("gamma", Item::Seq(out.octa.gamma_seq))),
        );
        return Err(CliError::Failed(
            "step-by-step and general constructions disagree".into(),
        ));
    }
    let o = &out.octa;
    let bundle = Bundle::new("octa")
        .seq("gamma", &o.gamma_seq)
        .map("phi3", &o.phis[0])
        .map("phi4", &o.phis[1])
        .map("psi1", &o.psis[0])
        .map("psi2", &o.psis[1])
        .map("psi3", &o.psis[2]);
    emit(
        cli,
        &print(&Document::new(doc.field).with("octa", Item::Bundle(bundle))),
    )
}

fn check(cli: &Cli) -> Result<()> {
    let report = if cli.input.is_some() {
        let doc = read_doc(cli)?;
        let seqs: Vec<(String, NSeq)> = doc
            .seqs()
            .map(|(l, s)| (l.to_string(), s.clone()))
            .collect();
        check_sequences(&seqs)
    } else {
        let ns: Vec<usize> = cli.n.map_or_else(|| (3..=6).collect(), |n| vec![n]);
        let primes: Vec<u32> = cli.prime.map_or_else(|| vec![2, 5], |p| vec![p]);
        let mut report = Report::default();
        for &p in &primes {
            for &n in &ns {
                let params = SuiteParams {
                    n,
                    prime: p,
                    trials: cli.trials,
                    max_dim: cli.max_dim,
                    degree_lo: cli.degree_lo,
                    degree_hi: cli.degree_hi,
                    seed: cli.seed,
                };
                params
                    .validate()
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                report.merge(run_all(&params)?);
            }
        }
        report
    };
    let body = match cli.format {
        Format::Text => report.to_text(),
        Format::Jsonl => report.to_json_lines(),
    };
    emit(cli, &body)?;
    if cli.out.is_some() {
        println!(
            "{} checks, {} failures",
            report.checks.len(),
            report.failures()
        );
    }
    if report.is_clean() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} failing trials",
            report.failures()
        )))
    }
}
