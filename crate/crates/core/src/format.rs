//! Text formats (category, chain complex, simplicial set, 2-category) and
//! DOT export.
//!
//! Every format is line-oriented UTF-8 with `#` comments. Writers emit a
//! canonical form, so `write(parse(write(x))) == write(x)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::chain::{ChainComplex, ChainMap, Mat};
use crate::error::{Error, Result};
use crate::fincat::{validate_category, CatBuilder, FinCat, MorSet};
use crate::model::ModelStructure;
use crate::simplicial::{NdSimplex, SSet, Simplex};
use crate::twocat::{Cell1, Cell2, TwoCat};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// A parsed category file: the category and its named morphism classes.
#[derive(Clone, Debug)]
pub struct CatFile {
    pub cat: FinCat,
    pub classes: BTreeMap<String, MorSet>,
}

impl CatFile {
    pub fn class(&self, name: &str) -> Result<MorSet> {
        self.classes.get(name).cloned().ok_or_else(|| Error::Input(format!("missing class {name}")))
    }

    /// Classes `W`, `F` and `coF` as an (unvalidated) model structure.
    pub fn model(&self) -> Result<ModelStructure> {
        Ok(ModelStructure::new(
            self.cat.name(),
            self.cat.clone(),
            self.class("W")?,
            self.class("F")?,
            self.class("coF")?,
        ))
    }
}

/// `<x> <op> <y> = <z>`, whitespace separated.
fn binary(ln: usize, rest: &str, op: &str) -> Result<[String; 3]> {
    let t: Vec<&str> = rest.split_whitespace().collect();
    if t.len() != 5 || t[1] != op || t[3] != "=" {
        return Err(perr(ln, format!("expected `<id> {op} <id> = <id>`")));
    }
    Ok([t[0].to_string(), t[2].to_string(), t[4].to_string()])
}

/// `<id> : <x> <arrow> <y>`, whitespace separated.
fn typed(ln: usize, rest: &str, arrow: &str) -> Result<[String; 3]> {
    let t: Vec<&str> = rest.split_whitespace().collect();
    if t.len() != 5 || t[1] != ":" || t[3] != arrow {
        return Err(perr(ln, format!("expected `<id> : <id> {arrow} <id>`")));
    }
    Ok([t[0].to_string(), t[2].to_string(), t[4].to_string()])
}

/// Parses the category format. The table is not validated; see
/// [`load_category`].
pub fn parse_category(text: &str) -> Result<CatFile> {
    let mut b = CatBuilder::new("C");
    let mut named = false;
    let mut composes = Vec::new();
    let mut classes = Vec::new();
    for (ln, l) in lines(text) {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match head {
            "category" => {
                if named {
                    return Err(perr(ln, "second category directive"));
                }
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(perr(ln, "expected `category <name>`"));
                }
                b.set_name(rest);
                named = true;
            }
            "object" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(perr(ln, "expected `object <id>`"));
                }
                if b.object_index(rest).is_some() {
                    return Err(perr(ln, format!("duplicate object {rest}")));
                }
                b.object(rest);
            }
            "morphism" => {
                let (name, dc) =
                    rest.split_once(':').ok_or_else(|| perr(ln, "expected `morphism <id> : <obj> -> <obj>`"))?;
                let (d, c) = dc.split_once("->").ok_or_else(|| perr(ln, "expected `<obj> -> <obj>`"))?;
                let name = name.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(perr(ln, "bad morphism id"));
                }
                let obj =
                    |s: &str| b.object_index(s.trim()).ok_or_else(|| perr(ln, format!("unknown object {}", s.trim())));
                let (d, c) = (obj(d)?, obj(c)?);
                if b.morphism_index(name).is_some() {
                    return Err(perr(ln, format!("duplicate morphism {name}")));
                }
                b.morphism(name, d, c);
            }
            "compose" => {
                let [g, f, h] = binary(ln, rest, ".")?;
                composes.push((ln, g, f, h));
            }
            "class" => {
                let (name, body) = rest.split_once('=').ok_or_else(|| perr(ln, "expected `class <name> = { ... }`"))?;
                let body = body.trim();
                let inner = body
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| perr(ln, "class members must be enclosed in braces"))?;
                let members: Vec<String> = inner
                    .split(|ch: char| ch == ',' || ch.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect();
                classes.push((ln, name.trim().to_string(), members));
            }
            other => return Err(perr(ln, format!("unknown directive `{other}`"))),
        }
    }
    for (ln, g, f, h) in composes {
        let m = |s: &str| b.morphism_index(s).ok_or_else(|| perr(ln, format!("unknown morphism {s}")));
        let (g, f, h) = (m(&g)?, m(&f)?, m(&h)?);
        b.compose(g, f, h);
    }
    let mut out = BTreeMap::new();
    for (ln, name, members) in classes {
        let mut set = MorSet::new();
        for s in &members {
            set.insert(b.morphism_index(s).ok_or_else(|| perr(ln, format!("unknown morphism {s}")))?);
        }
        if out.insert(name.clone(), set).is_some() {
            return Err(perr(ln, format!("duplicate class {name}")));
        }
    }
    Ok(CatFile { cat: b.build()?, classes: out })
}

/// Parses and validates the category axioms (violations are input errors).
pub fn load_category(text: &str) -> Result<CatFile> {
    let cf = parse_category(text)?;
    let v = validate_category(&cf.cat);
    if let Some(first) = v.first() {
        return Err(Error::Input(format!("not a category: {first}")));
    }
    Ok(cf)
}

/// Canonical category file; identities and their composites are implicit.
pub fn write_category(c: &FinCat, classes: &BTreeMap<String, MorSet>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "category {}", c.name());
    for o in c.objects() {
        let _ = writeln!(s, "object {}", c.object_name(o));
    }
    for f in c.morphisms().filter(|&f| !c.is_identity(f)) {
        let _ = writeln!(s, "morphism {} : {} -> {}", c.mor_name(f), c.object_name(c.dom(f)), c.object_name(c.cod(f)));
    }
    for g in c.morphisms().filter(|&g| !c.is_identity(g)) {
        for f in c.morphisms().filter(|&f| !c.is_identity(f)) {
            if let Some(h) = c.try_compose(g, f) {
                let _ = writeln!(s, "compose {} . {} = {}", c.mor_name(g), c.mor_name(f), c.mor_name(h));
            }
        }
    }
    for (name, set) in classes {
        let members: Vec<&str> = set.iter().map(|&f| c.mor_name(f)).collect();
        let _ = writeln!(s, "class {name} = {{ {} }}", members.join(", "));
    }
    s
}

pub fn write_model(m: &ModelStructure) -> String {
    let classes: BTreeMap<String, MorSet> =
        [("W".to_string(), m.w.clone()), ("F".to_string(), m.f.clone()), ("coF".to_string(), m.cof.clone())].into();
    write_category(&m.base, &classes)
}

fn parse_matrix(line: usize, text: &str, rows: usize, cols: usize, p: u32) -> Result<Mat> {
    let v: Vec<Vec<i64>> = serde_json::from_str(text.trim()).map_err(|e| perr(line, format!("bad matrix: {e}")))?;
    if v.is_empty() && (rows == 0 || cols == 0) {
        return Ok(Mat::zeros(rows, cols));
    }
    if v.len() != rows || v.iter().any(|r| r.len() != cols) {
        return Err(perr(line, format!("expected a {rows}x{cols} matrix")));
    }
    let flat: Vec<i64> = v.into_iter().flatten().collect();
    Ok(Mat::from_rows(rows, cols, &flat, p))
}

fn header_value<'a>(ln: usize, tok: &'a str, key: &str) -> Result<&'a str> {
    tok.strip_prefix(key).and_then(|s| s.strip_prefix('=')).ok_or_else(|| perr(ln, format!("expected {key}=<value>")))
}

fn split_eq(ln: usize, rest: &str) -> Result<(usize, &str)> {
    let (k, v) = rest.split_once('=').ok_or_else(|| perr(ln, "expected `<k> = <value>`"))?;
    let k = k.trim().parse::<usize>().map_err(|_| perr(ln, "degree must be a natural number"))?;
    Ok((k, v.trim()))
}

type Block<'a> = Vec<(usize, &'a str)>;

fn chain_blocks(text: &str) -> Result<(Vec<Block<'_>>, Block<'_>)> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut maps = Vec::new();
    for (ln, l) in lines(text) {
        if l.starts_with("chain") {
            blocks.push(vec![(ln, l)]);
        } else if l.starts_with("map") {
            maps.push((ln, l));
        } else if let Some(b) = blocks.last_mut() {
            if !maps.is_empty() {
                return Err(perr(ln, "complex lines after map lines"));
            }
            b.push((ln, l));
        } else {
            return Err(perr(ln, "expected `chain p=<prime> N=<top>`"));
        }
    }
    Ok((blocks, maps))
}

fn parse_chain_block(block: &[(usize, &str)]) -> Result<ChainComplex> {
    let (ln, head) = block[0];
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "chain" {
        return Err(perr(ln, "expected `chain p=<prime> N=<top>`"));
    }
    let p: u32 = header_value(ln, toks[1], "p")?.parse().map_err(|_| perr(ln, "bad prime"))?;
    let top: usize = header_value(ln, toks[2], "N")?.parse().map_err(|_| perr(ln, "bad top degree"))?;
    let mut dims: Vec<Option<usize>> = vec![None; top + 1];
    let mut ds: Vec<Option<(usize, &str)>> = vec![None; top + 1];
    for &(ln, l) in &block[1..] {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let (k, v) = split_eq(ln, rest)?;
        if k > top {
            return Err(perr(ln, format!("degree {k} exceeds N={top}")));
        }
        match head {
            "dim" => dims[k] = Some(v.parse().map_err(|_| perr(ln, "bad dimension"))?),
            "d" if k >= 1 => ds[k] = Some((ln, v)),
            "d" => return Err(perr(ln, "d 0 is implicit")),
            other => return Err(perr(ln, format!("unknown directive `{other}`"))),
        }
    }
    let dims: Vec<usize> = dims
        .into_iter()
        .enumerate()
        .map(|(k, d)| d.ok_or_else(|| perr(ln, format!("missing `dim {k}`"))))
        .collect::<Result<_>>()?;
    if !crate::chain::is_prime(p) {
        return Err(perr(ln, format!("{p} is not prime")));
    }
    let mut bounds = Vec::new();
    for k in 1..=top {
        bounds.push(match ds[k] {
            Some((l, v)) => parse_matrix(l, v, dims[k - 1], dims[k], p)?,
            None => Mat::zeros(dims[k - 1], dims[k]),
        });
    }
    ChainComplex::new(p, dims, bounds)
}

/// One `chain` block.
pub fn parse_chain(text: &str) -> Result<ChainComplex> {
    let (blocks, maps) = chain_blocks(text)?;
    if blocks.len() != 1 || !maps.is_empty() {
        return Err(Error::Input("a complex file holds exactly one chain block".into()));
    }
    parse_chain_block(&blocks[0])
}

/// Source block, target block, then `map k = [[...]]` lines.
pub fn parse_chain_map(text: &str) -> Result<ChainMap> {
    let (blocks, maps) = chain_blocks(text)?;
    if blocks.len() != 2 {
        return Err(Error::Input("a map file holds a source and a target chain block".into()));
    }
    let src = parse_chain_block(&blocks[0])?;
    let tgt = parse_chain_block(&blocks[1])?;
    if src.p != tgt.p || src.top != tgt.top {
        return Err(Error::Input("source and target need the same prime and top degree".into()));
    }
    let mut f: Vec<Option<Mat>> = vec![None; src.top + 1];
    for (ln, l) in maps {
        let rest = l.strip_prefix("map").unwrap();
        let (k, v) = split_eq(ln, rest)?;
        if k > src.top {
            return Err(perr(ln, format!("degree {k} exceeds N={}", src.top)));
        }
        f[k] = Some(parse_matrix(ln, v, tgt.dims[k], src.dims[k], src.p)?);
    }
    let f = f.into_iter().enumerate().map(|(k, m)| m.unwrap_or_else(|| Mat::zeros(tgt.dims[k], src.dims[k]))).collect();
    ChainMap::new(src, tgt, f)
}

pub fn write_chain(c: &ChainComplex) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "chain p={} N={}", c.p, c.top);
    for k in 0..=c.top {
        let _ = writeln!(s, "dim {k} = {}", c.dims[k]);
    }
    for k in 1..=c.top {
        let _ = writeln!(s, "d {k} = {}", c.d[k]);
    }
    s
}

pub fn write_chain_map(f: &ChainMap) -> String {
    let mut s = write_chain(&f.src);
    s.push_str(&write_chain(&f.tgt));
    for (k, m) in f.f.iter().enumerate() {
        let _ = writeln!(s, "map {k} = {m}");
    }
    s
}

/// Splits at commas outside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// `s_i` on a normal form; never needs face data.
fn degenerate(x: &Simplex, i: usize) -> Simplex {
    let n = x.dim();
    Simplex { sigma: (0..=n + 1).map(|j| x.sigma[if j <= i { j } else { j - 1 }]).collect(), nd: x.nd }
}

fn parse_face(ln: usize, tok: &str, names: &HashMap<String, (usize, usize)>) -> Result<Simplex> {
    if let Some(rest) = tok.strip_prefix('s') {
        if let Some(open) = rest.find('(') {
            if let (Ok(i), Some(inner)) = (rest[..open].parse::<usize>(), rest[open + 1..].strip_suffix(')')) {
                let x = parse_face(ln, inner, names)?;
                if i > x.dim() {
                    return Err(perr(ln, format!("s{i} applied to a {}-simplex", x.dim())));
                }
                return Ok(degenerate(&x, i));
            }
        }
    }
    let &(k, id) = names.get(tok).ok_or_else(|| perr(ln, format!("unknown simplex {tok}")))?;
    Ok(Simplex::nondegenerate(k, id))
}

/// `sset d=<dim> [name=<name>]`, then `simplex <degree> <id> faces=<f_0,...,f_k>`
/// in nondecreasing degree. Degenerate faces are written `s<i>(<face>)`.
pub fn parse_sset(text: &str) -> Result<SSet> {
    let mut it = lines(text);
    let (ln, head) = it.next().ok_or_else(|| Error::Input("empty simplicial set file".into()))?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.is_empty() || toks[0] != "sset" || toks.len() > 3 || toks.len() < 2 {
        return Err(perr(ln, "expected `sset d=<dim>`"));
    }
    let dim: usize = header_value(ln, toks[1], "d")?.parse().map_err(|_| perr(ln, "bad dimension"))?;
    let name = match toks.get(2) {
        Some(t) => header_value(ln, t, "name")?.to_string(),
        None => "X".to_string(),
    };
    let mut nd: Vec<Vec<NdSimplex>> = vec![Vec::new(); dim + 1];
    let mut names: HashMap<String, (usize, usize)> = HashMap::new();
    for (ln, l) in it {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.first() != Some(&"simplex") || toks.len() < 3 || toks.len() > 4 {
            return Err(perr(ln, "expected `simplex <degree> <id> faces=<...>`"));
        }
        let k: usize = toks[1].parse().map_err(|_| perr(ln, "bad degree"))?;
        if k > dim {
            return Err(perr(ln, format!("degree {k} exceeds d={dim}")));
        }
        let id = toks[2];
        if id.contains(['(', ')']) || split_top(id).len() > 1 {
            return Err(perr(ln, "simplex ids may not contain parentheses or commas"));
        }
        let faces = match (k, toks.get(3)) {
            (0, None) => Vec::new(),
            (0, Some(_)) => return Err(perr(ln, "vertices have no faces")),
            (_, None) => return Err(perr(ln, "missing faces=")),
            (_, Some(t)) => {
                let list = header_value(ln, t, "faces")?;
                let fs =
                    split_top(list).into_iter().map(|tok| parse_face(ln, tok, &names)).collect::<Result<Vec<_>>>()?;
                if fs.len() != k + 1 {
                    return Err(perr(ln, format!("a {k}-simplex has {} faces", k + 1)));
                }
                if let Some(bad) = fs.iter().find(|f| f.dim() + 1 != k) {
                    return Err(perr(ln, format!("face of degree {} in a {k}-simplex", bad.dim())));
                }
                fs
            }
        };
        if names.insert(id.to_string(), (k, nd[k].len())).is_some() {
            return Err(perr(ln, format!("duplicate simplex {id}")));
        }
        nd[k].push(NdSimplex { name: id.to_string(), faces });
    }
    while nd.len() > 1 && nd.last().unwrap().is_empty() {
        nd.pop();
    }
    let x = SSet { name, nd };
    x.check().map_err(|e| Error::Input(format!("not a simplicial set: {e}")))?;
    Ok(x)
}

pub fn write_sset(x: &SSet) -> String {
    let mut s = String::new();
    let name: String = x.name.chars().filter(|c| !c.is_whitespace()).collect();
    let _ = writeln!(s, "sset d={} name={}", x.dim(), name);
    for (k, level) in x.nd.iter().enumerate() {
        for y in level {
            if k == 0 {
                let _ = writeln!(s, "simplex 0 {}", y.name);
            } else {
                let faces: Vec<String> = y.faces.iter().map(|f| x.show(f)).collect();
                let _ = writeln!(s, "simplex {k} {} faces={}", y.name, faces.join(","));
            }
        }
    }
    s
}

/// Flat 2-category format: cells, identities and every defined entry of
/// the three composition tables.
pub fn write_twocat(t: &TwoCat) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "twocat {}", t.name);
    for o in &t.objects {
        let _ = writeln!(s, "object {o}");
    }
    for c in &t.cells1 {
        let _ = writeln!(s, "cell1 {} : {} -> {}", c.name, t.objects[c.dom], t.objects[c.cod]);
    }
    for c in &t.cells2 {
        let _ = writeln!(s, "cell2 {} : {} => {}", c.name, t.cells1[c.src].name, t.cells1[c.tgt].name);
    }
    for (o, &f) in t.id1.iter().enumerate() {
        let _ = writeln!(s, "id1 {} = {}", t.objects[o], t.cells1[f].name);
    }
    for (f, &a) in t.id2.iter().enumerate() {
        let _ = writeln!(s, "id2 {} = {}", t.cells1[f].name, t.cells2[a].name);
    }
    let (n1, n2) = (t.n1(), t.n2());
    for (k, e) in t.comp1.iter().enumerate() {
        if let Some(h) = e {
            let _ = writeln!(s, "comp1 {} . {} = {}", t.cells1[k / n1].name, t.cells1[k % n1].name, t.cells1[*h].name);
        }
    }
    for (k, e) in t.vcomp.iter().enumerate() {
        if let Some(c) = e {
            let _ = writeln!(s, "vcomp {} . {} = {}", t.cells2[k / n2].name, t.cells2[k % n2].name, t.cells2[*c].name);
        }
    }
    for (k, e) in t.hcomp.iter().enumerate() {
        if let Some(c) = e {
            let _ = writeln!(s, "hcomp {} * {} = {}", t.cells2[k / n2].name, t.cells2[k % n2].name, t.cells2[*c].name);
        }
    }
    s
}

pub fn parse_twocat(text: &str) -> Result<TwoCat> {
    let mut name = "T".to_string();
    let mut objects: Vec<String> = Vec::new();
    let mut cells1: Vec<Cell1> = Vec::new();
    let mut cells2: Vec<Cell2> = Vec::new();
    let mut id1: Vec<Option<usize>> = Vec::new();
    let mut id2: Vec<Option<usize>> = Vec::new();
    let mut tables: Vec<(usize, &str, String, String, String)> = Vec::new();
    let find = |v: &[String], s: &str| v.iter().position(|x| x == s);
    for (ln, l) in lines(text) {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match head {
            "twocat" => name = rest.to_string(),
            "object" => {
                if find(&objects, rest).is_some() {
                    return Err(perr(ln, format!("duplicate object {rest}")));
                }
                objects.push(rest.to_string());
            }
            "cell1" => {
                let [n, d, c] = typed(ln, rest, "->")?;
                let o = |s: &str| find(&objects, s).ok_or_else(|| perr(ln, format!("unknown object {s}")));
                cells1.push(Cell1 { name: n, dom: o(&d)?, cod: o(&c)? });
            }
            "cell2" => {
                let [n, a, b] = typed(ln, rest, "=>")?;
                let names1: Vec<String> = cells1.iter().map(|c| c.name.clone()).collect();
                let c = |s: &str| find(&names1, s).ok_or_else(|| perr(ln, format!("unknown 1-cell {s}")));
                cells2.push(Cell2 { name: n, src: c(&a)?, tgt: c(&b)? });
            }
            "id1" | "id2" => {
                let t: Vec<&str> = rest.split_whitespace().collect();
                if t.len() != 3 || t[1] != "=" {
                    return Err(perr(ln, format!("expected `{head} <id> = <id>`")));
                }
                tables.push((ln, head, String::new(), t[0].to_string(), t[2].to_string()));
            }
            "comp1" | "vcomp" | "hcomp" => {
                let [b, a, r] = binary(ln, rest, if head == "hcomp" { "*" } else { "." })?;
                tables.push((ln, head, b, a, r));
            }
            other => return Err(perr(ln, format!("unknown directive `{other}`"))),
        }
    }
    let (n1, n2) = (cells1.len(), cells2.len());
    let names1: Vec<String> = cells1.iter().map(|c| c.name.clone()).collect();
    let names2: Vec<String> = cells2.iter().map(|c| c.name.clone()).collect();
    for (what, v) in [("1-cell", &names1), ("2-cell", &names2)] {
        let mut seen = std::collections::HashSet::new();
        if let Some(d) = v.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(Error::Input(format!("duplicate {what} {d}")));
        }
    }
    id1.resize(objects.len(), None);
    id2.resize(n1, None);
    let mut comp1 = vec![None; n1 * n1];
    let mut vcomp = vec![None; n2 * n2];
    let mut hcomp = vec![None; n2 * n2];
    for (ln, head, b, a, r) in tables {
        let c1 = |s: &str| find(&names1, s).ok_or_else(|| perr(ln, format!("unknown 1-cell {s}")));
        let c2 = |s: &str| find(&names2, s).ok_or_else(|| perr(ln, format!("unknown 2-cell {s}")));
        match head {
            "id1" => id1[find(&objects, &a).ok_or_else(|| perr(ln, format!("unknown object {a}")))?] = Some(c1(&r)?),
            "id2" => id2[c1(&a)?] = Some(c2(&r)?),
            "comp1" => comp1[c1(&b)? * n1 + c1(&a)?] = Some(c1(&r)?),
            "vcomp" => vcomp[c2(&b)? * n2 + c2(&a)?] = Some(c2(&r)?),
            _ => hcomp[c2(&b)? * n2 + c2(&a)?] = Some(c2(&r)?),
        }
    }
    let id1 = id1
        .into_iter()
        .enumerate()
        .map(|(o, x)| x.ok_or_else(|| Error::Input(format!("missing id1 for {}", objects[o]))))
        .collect::<Result<Vec<_>>>()?;
    let id2 = id2
        .into_iter()
        .enumerate()
        .map(|(f, x)| x.ok_or_else(|| Error::Input(format!("missing id2 for {}", names1[f]))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TwoCat { name, objects, cells1, id1, comp1, cells2, id2, vcomp, hcomp })
}

fn q(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn dot_category(c: &FinCat) -> String {
    let mut s = format!("digraph {} {{\n", q(c.name()));
    for o in c.objects() {
        let _ = writeln!(s, "  {};", q(c.object_name(o)));
    }
    for f in c.morphisms().filter(|&f| !c.is_identity(f)) {
        let _ = writeln!(
            s,
            "  {} -> {} [label={}];",
            q(c.object_name(c.dom(f))),
            q(c.object_name(c.cod(f))),
            q(c.mor_name(f))
        );
    }
    s.push_str("}\n");
    s
}

/// The 1-skeleton: vertices, and each nondegenerate edge from `d_1` to `d_0`.
pub fn dot_sset(x: &SSet) -> String {
    let mut s = format!("digraph {} {{\n", q(&x.name));
    for v in x.nd.first().into_iter().flatten() {
        let _ = writeln!(s, "  {};", q(&v.name));
    }
    if let Some(edges) = x.nd.get(1) {
        for e in edges {
            let (a, b) = (&x.nd[0][e.faces[1].nd].name, &x.nd[0][e.faces[0].nd].name);
            let _ = writeln!(s, "  {} -> {} [label={}];", q(a), q(b), q(&e.name));
        }
    }
    s.push_str("}\n");
    s
}

/// Non-identity 1-cells as edges labelled with the number of 2-cells out of them.
pub fn dot_twocat(t: &TwoCat) -> String {
    let mut s = format!("digraph {} {{\n", q(&t.name));
    for o in &t.objects {
        let _ = writeln!(s, "  {};", q(o));
    }
    for (f, c) in t.cells1.iter().enumerate() {
        if t.id1.contains(&f) {
            continue;
        }
        let n = t.cells2.iter().filter(|a| a.src == f).count();
        let _ = writeln!(
            s,
            "  {} -> {} [label={}];",
            q(&t.objects[c.dom]),
            q(&t.objects[c.cod]),
            q(&format!("{} ({n})", c.name))
        );
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{chain_example, trivial_2x2, walking_homotopy, walking_iso};
    use crate::simplicial::{boundary, nerve, sd, sd_standard, standard_simplex};

    const CHAIN3: &str = "# x -> y -> z\ncategory chain3\nobject x\nobject y\nobject z\n\
        morphism f : x -> y\nmorphism g : y -> z\nmorphism gf : x -> z\ncompose g . f = gf\n";

    #[test]
    fn category_round_trip() {
        let cf = load_category(CHAIN3).unwrap();
        assert_eq!(cf.cat, chain_example());
        let text = write_category(&cf.cat, &cf.classes);
        assert_eq!(write_category(&parse_category(&text).unwrap().cat, &cf.classes), text);
        let m = trivial_2x2();
        let t = write_model(&m);
        let back = load_category(&t).unwrap().model().unwrap();
        assert_eq!((back.w, back.f, back.cof), (m.w, m.f, m.cof));
        assert_eq!(write_model(&load_category(&t).unwrap().model().unwrap()), t);
    }

    #[test]
    fn category_errors() {
        assert!(matches!(parse_category("objekt x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_category("object x\nmorphism f : x -> y"), Err(Error::Parse { line: 2, .. })));
        let missing = "object x\nobject y\nobject z\nmorphism f : x -> y\nmorphism g : y -> z\n";
        assert!(parse_category(missing).is_ok());
        assert!(load_category(missing).is_err());
        assert!(parse_category("object x\nclass W = id_x").is_err());
        let cf = parse_category("object x\nclass W = { id_x }").unwrap();
        assert_eq!(cf.class("W").unwrap().len(), 1);
    }

    #[test]
    fn chain_round_trip() {
        let text = "chain p=3 N=2\ndim 0 = 1\ndim 1 = 2\ndim 2 = 1\nd 1 = [[1, -1]]\nd 2 = [[1], [1]]\n";
        let c = parse_chain(text).unwrap();
        assert_eq!(c.boundary(1).get(0, 1), 2);
        let w = write_chain(&c);
        assert_eq!(parse_chain(&w).unwrap(), c);
        assert!(parse_chain("chain p=4 N=0\ndim 0 = 1\n").is_err());
        assert!(parse_chain("chain p=2 N=1\ndim 0 = 1\ndim 1 = 1\nd 1 = [[1, 1]]\n").is_err());
        let d2 = ChainComplex::disk(2, 1, 1).unwrap();
        let f = ChainMap::identity(&d2);
        let t = write_chain_map(&f);
        assert_eq!(parse_chain_map(&t).unwrap(), f);
        let empty = ChainComplex::zero(5, 2);
        assert_eq!(parse_chain(&write_chain(&empty)).unwrap(), empty);
    }

    #[test]
    fn sset_round_trip() {
        let (b, _) = boundary(2).unwrap();
        for x in [standard_simplex(3), b.clone(), nerve(&walking_iso(), 3), sd_standard(2), sd(&b)] {
            let t = write_sset(&x);
            let y = parse_sset(&t).unwrap();
            assert_eq!(y.nd, x.nd);
            assert_eq!(write_sset(&y), t);
        }
        let bad = "sset d=1\nsimplex 0 a\nsimplex 1 e faces=a\n";
        assert!(parse_sset(bad).is_err());
        let degenerate = "sset d=2\nsimplex 0 a\nsimplex 1 e faces=a,a\nsimplex 2 t faces=e,e,s0(a)\n";
        assert!(parse_sset(degenerate).is_ok());
    }

    #[test]
    fn twocat_round_trip() {
        let t = TwoCat::indiscrete(&walking_homotopy());
        let w = write_twocat(&t);
        assert_eq!(parse_twocat(&w).unwrap(), t);
        assert!(parse_twocat("twocat T\nobject X\n").is_err());
    }

    #[test]
    fn dot_outputs() {
        let d = dot_sset(&nerve(&chain_example(), 2));
        assert_eq!(d.matches("->").count(), 3);
        assert!(dot_category(&chain_example()).starts_with("digraph"));
        assert!(dot_twocat(&TwoCat::discrete(&walking_iso())).contains("(1)"));
    }
}
