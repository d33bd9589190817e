//! Line-based text format for exact values. See `docs/format.md`.
//!
//! ```text
//! nangle-text 1
//! prime 5
//! begin nseq s
//! n 3
//! shift 1
//! object 1 = {0:1}
//! object 2 = {0:1}
//! object 3 = {}
//! map 1 @ 0 = [1]
//! end
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded::{GradedMap, GradedObject};
use crate::matrix::Matrix;
use crate::sequence::{NSeq, SeqMorphism};

pub const HEADER: &str = "nangle-text 1";

/// A named group of maps and sequences, used for composite values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub kind: String,
    pub maps: Vec<(String, GradedMap)>,
    pub seqs: Vec<(String, NSeq)>,
}

impl Bundle {
    pub fn new(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            maps: Vec::new(),
            seqs: Vec::new(),
        }
    }

    pub fn map(mut self, name: &str, m: &GradedMap) -> Self {
        self.maps.push((name.to_string(), m.clone()));
        self
    }

    pub fn seq(mut self, name: &str, s: &NSeq) -> Self {
        self.seqs.push((name.to_string(), s.clone()));
        self
    }

    pub fn get_map(&self, name: &str) -> Result<&GradedMap> {
        self.maps
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::Invalid(format!("{} bundle has no map {name}", self.kind)))
    }

    pub fn get_seq(&self, name: &str) -> Result<&NSeq> {
        self.seqs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::Invalid(format!("{} bundle has no sequence {name}", self.kind)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Seq(NSeq),
    Map(GradedMap),
    Morphism(SeqMorphism),
    Bundle(Bundle),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub field: PrimeField,
    pub items: Vec<(String, Item)>,
}

impl Document {
    pub fn new(field: PrimeField) -> Self {
        Self {
            field,
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, label: &str, item: Item) {
        self.items.push((label.to_string(), item));
    }

    pub fn with(mut self, label: &str, item: Item) -> Self {
        self.push(label, item);
        self
    }

    pub fn get(&self, label: &str) -> Option<&Item> {
        self.items.iter().find(|(l, _)| l == label).map(|(_, i)| i)
    }

    pub fn seqs(&self) -> impl Iterator<Item = (&str, &NSeq)> {
        self.items.iter().filter_map(|(l, i)| match i {
            Item::Seq(s) => Some((l.as_str(), s)),
            _ => None,
        })
    }
}

// ---------------------------------------------------------------- printing

pub fn format_object(x: &GradedObject) -> String {
    let parts: Vec<String> = x.iter().map(|(d, k)| format!("{d}:{k}")).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn format_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

fn print_map_body(out: &mut String, m: &GradedMap) {
    let _ = writeln!(out, "source = {}", format_object(m.source()));
    let _ = writeln!(out, "target = {}", format_object(m.target()));
    for (d, b) in m.blocks() {
        if !b.is_zero() {
            let _ = writeln!(out, "block @ {d} = {}", format_matrix(b));
        }
    }
}

fn print_seq_body(out: &mut String, s: &NSeq) {
    let _ = writeln!(out, "n {}", s.n());
    let _ = writeln!(out, "shift {}", s.shift());
    for (i, o) in s.objects().iter().enumerate() {
        let _ = writeln!(out, "object {} = {}", i + 1, format_object(o));
    }
    for (i, m) in s.maps().iter().enumerate() {
        for (d, b) in m.blocks() {
            if !b.is_zero() {
                let _ = writeln!(out, "map {} @ {d} = {}", i + 1, format_matrix(b));
            }
        }
    }
}

fn print_item(out: &mut String, label: &str, item: &Item) {
    match item {
        Item::Seq(s) => {
            let _ = writeln!(out, "begin nseq {label}");
            print_seq_body(out, s);
        }
        Item::Map(m) => {
            let _ = writeln!(out, "begin map {label}");
            print_map_body(out, m);
        }
        Item::Morphism(m) => {
            let _ = writeln!(out, "begin morphism {label}");
            print_item(out, "source", &Item::Seq(m.source.clone()));
            print_item(out, "target", &Item::Seq(m.target.clone()));
            for (i, c) in m.components.iter().enumerate() {
                for (d, b) in c.blocks() {
                    if !b.is_zero() {
                        let _ = writeln!(out, "component {} @ {d} = {}", i + 1, format_matrix(b));
                    }
                }
            }
        }
        Item::Bundle(b) => {
            let _ = writeln!(out, "begin {} {label}", b.kind);
            for (name, s) in &b.seqs {
                print_item(out, name, &Item::Seq(s.clone()));
            }
            for (name, m) in &b.maps {
                print_item(out, name, &Item::Map(m.clone()));
            }
        }
    }
    out.push_str("end\n");
}

pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "prime {}", doc.field.p());
    for (label, item) in &doc.items {
        print_item(&mut out, label, item);
    }
    out
}

/// Convenience: a one-item document.
pub fn print_one(field: PrimeField, label: &str, item: Item) -> String {
    print(&Document::new(field).with(label, item))
}

pub fn print_seqs(field: PrimeField, seqs: &[(&str, &NSeq)]) -> String {
    let mut doc = Document::new(field);
    for (l, s) in seqs {
        doc.push(l, Item::Seq((*s).clone()));
    }
    print(&doc)
}

// ----------------------------------------------------------------- parsing

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(src: &'a str) -> Self {
        let lines = src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Self { lines, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.pos).copied();
        self.pos += 1;
        l
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.0)
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_int<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| err(line, format!("expected an integer, found {s:?}")))
}

pub fn parse_object(line: usize, s: &str) -> Result<GradedObject> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| err(line, "object must be written {degree:dim, ...}"))?;
    let mut pairs = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (d, k) = part
            .split_once(':')
            .ok_or_else(|| err(line, format!("bad entry {part:?}")))?;
        let d: i64 = parse_int(line, d)?;
        let k: usize = parse_int(line, k)?;
        if !seen.insert(d) {
            return Err(err(line, format!("degree {d} listed twice")));
        }
        pairs.push((d, k));
    }
    Ok(GradedObject::from_pairs(pairs))
}

pub fn parse_matrix(line: usize, field: PrimeField, s: &str) -> Result<Matrix> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err(line, "matrix must be written [a b; c d]"))?;
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for r in inner.split(';') {
        let row = r
            .split_whitespace()
            .map(|x| {
                let v: u32 = parse_int(line, x)?;
                if v >= field.p() {
                    return Err(err(line, format!("entry {v} is not in [0, {})", field.p())));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() == 1 && rows[0].is_empty() {
        rows.clear();
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(err(line, "ragged matrix"));
    }
    let n = rows.len();
    Matrix::from_vec(field, n, cols, rows.concat()).map_err(|e| err(line, e.to_string()))
}

/// Splits `key i @ d = value` into `(i, d, value)`.
fn indexed(line: usize, rest: &str) -> Result<(usize, i64, &str)> {
    let (lhs, value) = rest
        .split_once('=')
        .ok_or_else(|| err(line, "missing '='"))?;
    let (i, d) = lhs
        .split_once('@')
        .ok_or_else(|| err(line, "missing '@'"))?;
    Ok((parse_int(line, i)?, parse_int(line, d)?, value))
}

fn field_value(line: usize, rest: &str) -> Result<&str> {
    rest.trim()
        .strip_prefix('=')
        .ok_or_else(|| err(line, "missing '='"))
}

fn parse_block_header(line: usize, text: &str) -> Result<(String, String)> {
    let mut parts = text.split_whitespace();
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some("begin"), Some(kind), Some(label), None) => Ok((kind.to_string(), label.to_string())),
        _ => Err(err(
            line,
            format!("expected 'begin <kind> <label>', found {text:?}"),
        )),
    }
}

fn parse_map_body(lines: &mut Lines, field: PrimeField, start: usize) -> Result<GradedMap> {
    let mut source = None;
    let mut target = None;
    let mut blocks: BTreeMap<i64, (usize, Matrix)> = BTreeMap::new();
    loop {
        let (ln, text) = lines
            .next()
            .ok_or_else(|| err(start, "unterminated map block"))?;
        if text == "end" {
            break;
        }
        if let Some(rest) = text.strip_prefix("source") {
            source = Some(parse_object(ln, field_value(ln, rest)?)?);
        } else if let Some(rest) = text.strip_prefix("target") {
            target = Some(parse_object(ln, field_value(ln, rest)?)?);
        } else if let Some(rest) = text.strip_prefix("block") {
            let (lhs, value) = rest.split_once('=').ok_or_else(|| err(ln, "missing '='"))?;
            let d: i64 = parse_int(
                ln,
                lhs.trim()
                    .strip_prefix('@')
                    .ok_or_else(|| err(ln, "missing '@'"))?,
            )?;
            if blocks
                .insert(d, (ln, parse_matrix(ln, field, value)?))
                .is_some()
            {
                return Err(err(ln, format!("block @ {d} given twice")));
            }
        } else {
            return Err(err(ln, format!("unexpected line in map block: {text:?}")));
        }
    }
    let source = source.ok_or_else(|| err(start, "map block without source"))?;
    let target = target.ok_or_else(|| err(start, "map block without target"))?;
    build_map(field, &source, &target, blocks)
}

fn build_map(
    field: PrimeField,
    source: &GradedObject,
    target: &GradedObject,
    blocks: BTreeMap<i64, (usize, Matrix)>,
) -> Result<GradedMap> {
    let mut clean = BTreeMap::new();
    for (d, (ln, b)) in blocks {
        if source.dim(d) == 0 || target.dim(d) == 0 {
            return Err(err(ln, format!("block @ {d} outside the common support")));
        }
        if b.rows() != target.dim(d) || b.cols() != source.dim(d) {
            return Err(err(
                ln,
                format!(
                    "block @ {d} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    target.dim(d),
                    source.dim(d)
                ),
            ));
        }
        clean.insert(d, b);
    }
    GradedMap::from_blocks(field, source, target, clean)
}

fn parse_seq_body(lines: &mut Lines, field: PrimeField, start: usize) -> Result<NSeq> {
    let mut n: Option<usize> = None;
    let mut shift: i64 = 1;
    let mut objects: BTreeMap<usize, GradedObject> = BTreeMap::new();
    let mut blocks: BTreeMap<usize, BTreeMap<i64, (usize, Matrix)>> = BTreeMap::new();
    loop {
        let (ln, text) = lines
            .next()
            .ok_or_else(|| err(start, "unterminated nseq block"))?;
        if text == "end" {
            break;
        }
        let (key, rest) = text.split_once(' ').unwrap_or((text, ""));
        match key {
            "n" => n = Some(parse_int(ln, rest)?),
            "shift" => shift = parse_int(ln, rest)?,
            "object" => {
                let (i, value) = rest.split_once('=').ok_or_else(|| err(ln, "missing '='"))?;
                let i: usize = parse_int(ln, i)?;
                if objects.insert(i, parse_object(ln, value)?).is_some() {
                    return Err(err(ln, format!("object {i} given twice")));
                }
            }
            "map" => {
                let (i, d, value) = indexed(ln, rest)?;
                let m = parse_matrix(ln, field, value)?;
                if blocks.entry(i).or_default().insert(d, (ln, m)).is_some() {
                    return Err(err(ln, format!("map {i} @ {d} given twice")));
                }
            }
            _ => return Err(err(ln, format!("unexpected line in nseq block: {text:?}"))),
        }
    }
    let n = n.ok_or_else(|| err(start, "nseq block without n"))?;
    if n < 3 {
        return Err(err(start, format!("n = {n}, need n >= 3")));
    }
    if let Some((&i, _)) = objects.iter().find(|(&i, _)| i == 0 || i > n) {
        return Err(err(start, format!("object index {i} out of range")));
    }
    if let Some((&i, _)) = blocks.iter().find(|(&i, _)| i == 0 || i > n) {
        return Err(err(start, format!("map index {i} out of range")));
    }
    let objs: Vec<GradedObject> = (1..=n)
        .map(|i| objects.get(&i).cloned().unwrap_or_default())
        .collect();
    let mut maps = Vec::with_capacity(n);
    for i in 1..=n {
        let target = if i < n {
            objs[i].clone()
        } else {
            objs[0].shift(shift)
        };
        maps.push(build_map(
            field,
            &objs[i - 1],
            &target,
            blocks.remove(&i).unwrap_or_default(),
        )?);
    }
    NSeq::new(field, shift, objs, maps).map_err(|e| err(start, e.to_string()))
}

fn parse_morphism_body(lines: &mut Lines, field: PrimeField, start: usize) -> Result<SeqMorphism> {
    let mut seqs: BTreeMap<String, NSeq> = BTreeMap::new();
    let mut blocks: BTreeMap<usize, BTreeMap<i64, (usize, Matrix)>> = BTreeMap::new();
    loop {
        let (ln, text) = lines
            .next()
            .ok_or_else(|| err(start, "unterminated morphism block"))?;
        if text == "end" {
            break;
        }
        if text.starts_with("begin") {
            let (kind, label) = parse_block_header(ln, text)?;
            if kind != "nseq" || !(label == "source" || label == "target") {
                return Err(err(
                    ln,
                    "morphism blocks contain only 'nseq source' and 'nseq target'",
                ));
            }
            seqs.insert(label, parse_seq_body(lines, field, ln)?);
        } else if let Some(rest) = text.strip_prefix("component") {
            let (i, d, value) = indexed(ln, rest)?;
            let m = parse_matrix(ln, field, value)?;
            if blocks.entry(i).or_default().insert(d, (ln, m)).is_some() {
                return Err(err(ln, format!("component {i} @ {d} given twice")));
            }
        } else {
            return Err(err(
                ln,
                format!("unexpected line in morphism block: {text:?}"),
            ));
        }
    }
    let source = seqs
        .remove("source")
        .ok_or_else(|| err(start, "morphism without source"))?;
    let target = seqs
        .remove("target")
        .ok_or_else(|| err(start, "morphism without target"))?;
    let n = source.n();
    if let Some((&i, _)) = blocks.iter().find(|(&i, _)| i == 0 || i > n) {
        return Err(err(start, format!("component index {i} out of range")));
    }
    let mut comps = Vec::with_capacity(n);
    for i in 1..=n {
        comps.push(build_map(
            field,
            source.obj(i),
            target.obj(i),
            blocks.remove(&i).unwrap_or_default(),
        )?);
    }
    SeqMorphism::new(source, target, comps).map_err(|e| err(start, e.to_string()))
}

fn parse_bundle_body(
    lines: &mut Lines,
    field: PrimeField,
    kind: String,
    start: usize,
) -> Result<Bundle> {
    let mut b = Bundle::new(&kind);
    loop {
        let (ln, text) = lines
            .next()
            .ok_or_else(|| err(start, format!("unterminated {kind} block")))?;
        if text == "end" {
            break;
        }
        let (sub, label) = parse_block_header(ln, text)?;
        match sub.as_str() {
            "nseq" => b.seqs.push((label, parse_seq_body(lines, field, ln)?)),
            "map" => b.maps.push((label, parse_map_body(lines, field, ln)?)),
            _ => {
                return Err(err(
                    ln,
                    format!("{kind} blocks contain only nseq and map blocks"),
                ))
            }
        }
    }
    Ok(b)
}

pub fn parse(src: &str) -> Result<Document> {
    let mut lines = Lines::new(src);
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        Some((ln, h)) => return Err(err(ln, format!("expected header {HEADER:?}, found {h:?}"))),
        None => return Err(err(0, "empty input")),
    }
    let field = match lines.next() {
        Some((ln, l)) => {
            let p = l
                .strip_prefix("prime ")
                .ok_or_else(|| err(ln, "expected 'prime <p>'"))?;
            PrimeField::new(parse_int(ln, p)?).map_err(|e| err(ln, e.to_string()))?
        }
        None => return Err(err(lines.last_line(), "missing prime line")),
    };
    let mut doc = Document::new(field);
    while let Some((ln, text)) = lines.next() {
        let (kind, label) = parse_block_header(ln, text)?;
        if doc.get(&label).is_some() {
            return Err(err(ln, format!("label {label} used twice")));
        }
        let item = match kind.as_str() {
            "nseq" => Item::Seq(parse_seq_body(&mut lines, field, ln)?),
            "map" => Item::Map(parse_map_body(&mut lines, field, ln)?),
            "morphism" => Item::Morphism(parse_morphism_body(&mut lines, field, ln)?),
            _ => Item::Bundle(parse_bundle_body(&mut lines, field, kind, ln)?),
        };
        doc.push(&label, item);
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{random_exact, GenParams};
    use crate::sequence::trivial_seq;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn round_trip_sequences() {
        for seed in 0..30 {
            let s = random_exact(f5(), &GenParams::new(3 + (seed as usize % 4)), seed).unwrap();
            let doc = Document::new(f5()).with("s", Item::Seq(s));
            assert_eq!(parse(&print(&doc)).unwrap(), doc);
        }
    }

    #[test]
    fn round_trip_morphism_and_bundle() {
        let a = GradedObject::from_pairs([(0, 2), (-1, 1)]);
        let t = trivial_seq(f5(), 4, 1, &a, 2).unwrap();
        let m = SeqMorphism::identity(&t);
        let b = Bundle::new("splice4").map("f", t.map(1)).seq("angle", &t);
        let doc = Document::new(f5())
            .with("m", Item::Morphism(m))
            .with("b", Item::Bundle(b))
            .with("g", Item::Map(t.map(4).clone()));
        assert_eq!(parse(&print(&doc)).unwrap(), doc);
    }

    #[test]
    fn zero_sequence_text() {
        let z = NSeq::zero(f5(), 3, 1);
        let text = print_one(f5(), "z", Item::Seq(z.clone()));
        assert!(text.contains("object 1 = {}"));
        assert_eq!(parse(&text).unwrap().get("z"), Some(&Item::Seq(z)));
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(parse("hello"), Err(Error::Parse { line: 1, .. })));
        let bad_entry = "nangle-text 1\nprime 5\nbegin map f\nsource = {0:1}\ntarget = {0:1}\nblock @ 0 = [7]\nend\n";
        assert!(matches!(
            parse(bad_entry),
            Err(Error::Parse { line: 6, .. })
        ));
        let bad_shape = "nangle-text 1\nprime 5\nbegin map f\nsource = {0:1}\ntarget = {0:1}\nblock @ 0 = [1 1]\nend\n";
        assert!(parse(bad_shape).is_err());
        let unterminated = "nangle-text 1\nprime 5\nbegin nseq s\nn 3\n";
        assert!(parse(unterminated).is_err());
        assert!(parse("nangle-text 1\nprime 4\n").is_err());
    }
}
