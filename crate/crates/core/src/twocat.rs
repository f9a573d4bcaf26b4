//! Finite strict 2-categories stored as explicit tables, 2-functors,
//! equivalence detection and the connected-components functor `pi0`.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{
    enumerate_functors, enumerate_functors_where, validate_functor, FinCat, FinFunctor, Mor, Morphism, Obj,
};
use crate::search::Budget;
use crate::util::Dsu;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell1 {
    pub name: String,
    pub dom: Obj,
    pub cod: Obj,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell2 {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

/// Tables indexed `b * n + a` for composites `b . a` (vertical) and
/// `b * a` (horizontal, `a` first). Whiskers are horizontal composites with
/// identity 2-cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoCat {
    pub name: String,
    pub objects: Vec<String>,
    pub cells1: Vec<Cell1>,
    pub id1: Vec<usize>,
    pub comp1: Vec<Option<usize>>,
    pub cells2: Vec<Cell2>,
    pub id2: Vec<usize>,
    pub vcomp: Vec<Option<usize>>,
    pub hcomp: Vec<Option<usize>>,
}

impl TwoCat {
    pub fn n1(&self) -> usize {
        self.cells1.len()
    }

    pub fn n2(&self) -> usize {
        self.cells2.len()
    }

    /// `g . f` on 1-cells.
    pub fn c1(&self, g: usize, f: usize) -> Option<usize> {
        self.comp1[g * self.n1() + f]
    }

    /// `b . a` (vertical).
    pub fn v(&self, b: usize, a: usize) -> Option<usize> {
        self.vcomp[b * self.n2() + a]
    }

    /// `b * a` (horizontal).
    pub fn h(&self, b: usize, a: usize) -> Option<usize> {
        self.hcomp[b * self.n2() + a]
    }

    /// `r a`.
    pub fn whisker_r(&self, r: usize, a: usize) -> Option<usize> {
        self.h(self.id2[r], a)
    }

    /// `a l`.
    pub fn whisker_l(&self, a: usize, l: usize) -> Option<usize> {
        self.h(a, self.id2[l])
    }

    pub fn dom2(&self, a: usize) -> Obj {
        self.cells1[self.cells2[a].src].dom
    }

    pub fn cod2(&self, a: usize) -> Obj {
        self.cells1[self.cells2[a].src].cod
    }

    pub fn hom1(&self, a: Obj, b: Obj) -> Vec<usize> {
        (0..self.n1()).filter(|&f| self.cells1[f].dom == a && self.cells1[f].cod == b).collect()
    }

    /// 2-cells `f => g`.
    pub fn hom2(&self, f: usize, g: usize) -> Vec<usize> {
        (0..self.n2()).filter(|&a| self.cells2[a].src == f && self.cells2[a].tgt == g).collect()
    }

    pub fn find1(&self, name: &str) -> Option<usize> {
        self.cells1.iter().position(|c| c.name == name)
    }

    pub fn find2(&self, name: &str) -> Option<usize> {
        self.cells2.iter().position(|c| c.name == name)
    }

    pub fn is_identity2(&self, a: usize) -> bool {
        self.id2[self.cells2[a].src] == a
    }

    /// Underlying 1-category.
    pub fn underlying(&self) -> Result<FinCat> {
        let morphisms = self.cells1.iter().map(|c| Morphism { name: c.name.clone(), dom: c.dom, cod: c.cod }).collect();
        FinCat::from_parts(self.name.clone(), self.objects.clone(), morphisms, self.id1.clone(), self.comp1.clone())
    }

    /// `hom(a, b)` as a category, with the global indices of its objects
    /// (1-cells) and morphisms (2-cells).
    pub fn hom_category(&self, a: Obj, b: Obj) -> Result<(FinCat, Vec<usize>, Vec<usize>)> {
        let ones = self.hom1(a, b);
        let local1: HashMap<usize, usize> = ones.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let twos: Vec<usize> = (0..self.n2()).filter(|&x| local1.contains_key(&self.cells2[x].src)).collect();
        let local2: HashMap<usize, usize> = twos.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let morphisms = twos
            .iter()
            .map(|&x| Morphism {
                name: self.cells2[x].name.clone(),
                dom: local1[&self.cells2[x].src],
                cod: local1[&self.cells2[x].tgt],
            })
            .collect();
        let m = twos.len();
        let mut comp = vec![None; m * m];
        for (i, &bb) in twos.iter().enumerate() {
            for (j, &aa) in twos.iter().enumerate() {
                comp[i * m + j] = self.v(bb, aa).and_then(|r| local2.get(&r).copied());
            }
        }
        let identities = ones.iter().map(|&f| local2[&self.id2[f]]).collect();
        let names = ones.iter().map(|&f| self.cells1[f].name.clone()).collect();
        let cat = FinCat::from_parts(
            format!("{}[{},{}]", self.name, self.objects[a], self.objects[b]),
            names,
            morphisms,
            identities,
            comp,
        )?;
        Ok((cat, ones, twos))
    }

    /// A category as a 2-category with identity 2-cells only.
    pub fn discrete(c: &FinCat) -> TwoCat {
        let n1 = c.num_morphisms();
        let cells1: Vec<Cell1> =
            c.morphisms().map(|f| Cell1 { name: c.mor_name(f).to_string(), dom: c.dom(f), cod: c.cod(f) }).collect();
        let comp1: Vec<Option<usize>> = (0..n1 * n1).map(|k| c.try_compose(k / n1, k % n1)).collect();
        let cells2 = c.morphisms().map(|f| Cell2 { name: format!("Id_{}", c.mor_name(f)), src: f, tgt: f }).collect();
        let vcomp = (0..n1 * n1).map(|k| (k / n1 == k % n1).then_some(k % n1)).collect();
        TwoCat {
            name: c.name().to_string(),
            objects: c.object_names().to_vec(),
            cells1,
            id1: c.objects().map(|o| c.id(o)).collect(),
            hcomp: comp1.clone(),
            comp1,
            cells2,
            id2: (0..n1).collect(),
            vcomp,
        }
    }

    /// A category with exactly one 2-cell between any two parallel arrows.
    pub fn indiscrete(c: &FinCat) -> TwoCat {
        let n1 = c.num_morphisms();
        let comp1: Vec<Option<usize>> = (0..n1 * n1).map(|k| c.try_compose(k / n1, k % n1)).collect();
        let mut cells2 = Vec::new();
        let mut index = HashMap::new();
        for f in c.morphisms() {
            for g in c.morphisms().filter(|&g| c.parallel(f, g)) {
                index.insert((f, g), cells2.len());
                let name = if f == g {
                    format!("Id_{}", c.mor_name(f))
                } else {
                    format!("{}=>{}", c.mor_name(f), c.mor_name(g))
                };
                cells2.push(Cell2 { name, src: f, tgt: g });
            }
        }
        let n2 = cells2.len();
        let mut vcomp = vec![None; n2 * n2];
        let mut hcomp = vec![None; n2 * n2];
        for (b, cb) in cells2.iter().enumerate() {
            for (a, ca) in cells2.iter().enumerate() {
                if ca.tgt == cb.src {
                    vcomp[b * n2 + a] = Some(index[&(ca.src, cb.tgt)]);
                }
                if let (Some(s), Some(t)) = (c.try_compose(cb.src, ca.src), c.try_compose(cb.tgt, ca.tgt)) {
                    hcomp[b * n2 + a] = Some(index[&(s, t)]);
                }
            }
        }
        TwoCat {
            name: format!("{}~", c.name()),
            objects: c.object_names().to_vec(),
            cells1: c
                .morphisms()
                .map(|f| Cell1 { name: c.mor_name(f).to_string(), dom: c.dom(f), cod: c.cod(f) })
                .collect(),
            id1: c.objects().map(|o| c.id(o)).collect(),
            comp1,
            id2: c.morphisms().map(|f| index[&(f, f)]).collect(),
            cells2,
            vcomp,
            hcomp,
        }
    }

    /// The full sub-2-category of `Cat` on the given finite categories:
    /// functors as 1-cells and natural transformations as 2-cells.
    pub fn of_categories(name: &str, cats: &[FinCat], budget: &Budget) -> Result<TwoCat> {
        let mut cells1 = Vec::new();
        let mut funs: Vec<FinFunctor> = Vec::new();
        let mut idx1: HashMap<(Obj, Obj, FinFunctor), usize> = HashMap::new();
        let mut id1 = vec![0; cats.len()];
        for (a, ca) in cats.iter().enumerate() {
            for (b, cb) in cats.iter().enumerate() {
                for (k, f) in enumerate_functors(ca, cb, budget)?.into_iter().enumerate() {
                    let is_id = a == b && f == FinFunctor::identity(ca);
                    let nm =
                        if is_id { format!("id_{}", ca.name()) } else { format!("{}>{}/{}", ca.name(), cb.name(), k) };
                    if is_id {
                        id1[a] = cells1.len();
                    }
                    idx1.insert((a, b, f.clone()), cells1.len());
                    cells1.push(Cell1 { name: nm, dom: a, cod: b });
                    funs.push(f);
                }
            }
        }
        let n1 = cells1.len();
        let mut comp1 = vec![None; n1 * n1];
        for g in 0..n1 {
            for f in 0..n1 {
                if cells1[f].cod == cells1[g].dom {
                    let gf = funs[g].after(&funs[f]);
                    comp1[g * n1 + f] = Some(idx1[&(cells1[f].dom, cells1[g].cod, gf)]);
                }
            }
        }
        let mut cells2 = Vec::new();
        let mut comps: Vec<Vec<Mor>> = Vec::new();
        let mut idx2: HashMap<(usize, usize, Vec<Mor>), usize> = HashMap::new();
        let mut id2 = vec![0; n1];
        for f in 0..n1 {
            for g in 0..n1 {
                if cells1[f].dom != cells1[g].dom || cells1[f].cod != cells1[g].cod {
                    continue;
                }
                let (src, tgt) = (&cats[cells1[f].dom], &cats[cells1[f].cod]);
                for (k, t) in nat_transfs(src, tgt, &funs[f], &funs[g], budget)?.into_iter().enumerate() {
                    let is_id = f == g && src.objects().all(|o| t[o] == tgt.id(funs[f].omap[o]));
                    if is_id {
                        id2[f] = cells2.len();
                    }
                    let nm = if is_id {
                        format!("Id_{}", cells1[f].name)
                    } else {
                        format!("{}=>{}/{}", cells1[f].name, cells1[g].name, k)
                    };
                    idx2.insert((f, g, t.clone()), cells2.len());
                    cells2.push(Cell2 { name: nm, src: f, tgt: g });
                    comps.push(t);
                }
            }
        }
        let n2 = cells2.len();
        let mut vcomp = vec![None; n2 * n2];
        let mut hcomp = vec![None; n2 * n2];
        for b in 0..n2 {
            for a in 0..n2 {
                let (ca, cb) = (&cells2[a], &cells2[b]);
                if ca.tgt == cb.src {
                    let tgt = &cats[cells1[ca.src].cod];
                    let t: Vec<Mor> = comps[a].iter().zip(&comps[b]).map(|(&x, &y)| tgt.compose(y, x)).collect();
                    vcomp[b * n2 + a] = Some(idx2[&(ca.src, cb.tgt, t)]);
                }
                if cells1[ca.src].cod == cells1[cb.src].dom {
                    // (b * a)_o = b_{G o} . R(a_o) with a: F => G, b: R => S.
                    let outer = &cats[cells1[cb.src].cod];
                    let (g, r) = (&funs[ca.tgt], &funs[cb.src]);
                    let t: Vec<Mor> = comps[a]
                        .iter()
                        .enumerate()
                        .map(|(o, &ao)| outer.compose(comps[b][g.omap[o]], r.mmap[ao]))
                        .collect();
                    let s = comp1[cb.src * n1 + ca.src].unwrap();
                    let tt = comp1[cb.tgt * n1 + ca.tgt].unwrap();
                    hcomp[b * n2 + a] = Some(idx2[&(s, tt, t)]);
                }
            }
        }
        Ok(TwoCat {
            name: name.to_string(),
            objects: cats.iter().map(|c| c.name().to_string()).collect(),
            cells1,
            id1,
            comp1,
            cells2,
            id2,
            vcomp,
            hcomp,
        })
    }
}

/// Every natural transformation `f => g` between functors `src -> tgt`.
pub fn nat_transfs(
    src: &FinCat,
    tgt: &FinCat,
    f: &FinFunctor,
    g: &FinFunctor,
    budget: &Budget,
) -> Result<Vec<Vec<Mor>>> {
    let n = src.num_objects();
    let mut out = Vec::new();
    let mut cur: Vec<Mor> = Vec::with_capacity(n);
    nat_rec(src, tgt, f, g, budget, &mut cur, &mut out)?;
    Ok(out)
}

fn nat_rec(
    src: &FinCat,
    tgt: &FinCat,
    f: &FinFunctor,
    g: &FinFunctor,
    budget: &Budget,
    cur: &mut Vec<Mor>,
    out: &mut Vec<Vec<Mor>>,
) -> Result<()> {
    let o = cur.len();
    if o == src.num_objects() {
        out.push(cur.clone());
        return Ok(());
    }
    for &t in tgt.hom(f.omap[o], g.omap[o]) {
        budget.charge("natural transformations", 1)?;
        cur.push(t);
        let ok = src.morphisms().all(|m| {
            let (a, b) = (src.dom(m), src.cod(m));
            a > o || b > o || tgt.compose(g.mmap[m], cur[a]) == tgt.compose(cur[b], f.mmap[m])
        });
        if ok {
            nat_rec(src, tgt, f, g, budget, cur, out)?;
        }
        cur.pop();
    }
    Ok(())
}

/// One clause of a [`TwoCatReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoCatReport {
    pub clauses: Vec<Clause>,
}

impl TwoCatReport {
    pub fn is_valid(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for TwoCatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            match &c.witness {
                None => writeln!(f, "{}: ok", c.name)?,
                Some(w) => writeln!(f, "{}: FAIL ({w})", c.name)?,
            }
        }
        Ok(())
    }
}

fn clause(name: &'static str, witness: Option<String>) -> Clause {
    Clause { name, pass: witness.is_none(), witness }
}

fn first<I: Iterator<Item = String>>(mut it: I) -> Option<String> {
    it.next()
}

/// Checks the four groups of 2-category axioms and returns a witness for
/// the first failure in each.
pub fn validate_twocat(t: &TwoCat) -> TwoCatReport {
    let n1 = t.n1();
    let n2 = t.n2();
    let c1n = |f: usize| t.cells1[f].name.as_str();
    let c2n = |a: usize| t.cells2[a].name.as_str();

    let sizes_ok = t.comp1.len() == n1 * n1
        && t.vcomp.len() == n2 * n2
        && t.hcomp.len() == n2 * n2
        && t.id1.len() == t.objects.len()
        && t.id2.len() == n1;
    if !sizes_ok {
        let w = Some("table sizes do not match the cell counts".to_string());
        return TwoCatReport {
            clauses: vec![
                clause("shape", w.clone()),
                clause("vertical", w.clone()),
                clause("horizontal", w.clone()),
                clause("interchange", w),
            ],
        };
    }

    let shape = first((0..n2).filter_map(|a| {
        let c = &t.cells2[a];
        let (f, g) = (&t.cells1[c.src], &t.cells1[c.tgt]);
        (f.dom != g.dom || f.cod != g.cod).then(|| format!("{} joins non-parallel 1-cells", c2n(a)))
    }))
    .or_else(|| {
        first((0..n1).filter_map(|f| {
            let i = t.id2[f];
            (t.cells2[i].src != f || t.cells2[i].tgt != f).then(|| format!("Id_{} has the wrong type", c1n(f)))
        }))
    })
    .or_else(|| {
        first(t.objects.iter().enumerate().filter_map(|(o, name)| {
            let i = t.id1[o];
            (t.cells1[i].dom != o || t.cells1[i].cod != o).then(|| format!("id_{name} has the wrong type"))
        }))
    });

    // Vertical: each hom is a category.
    let vertical = first((0..n2).flat_map(|b| (0..n2).map(move |a| (b, a))).filter_map(|(b, a)| {
        let composable = t.cells2[a].tgt == t.cells2[b].src;
        match (composable, t.v(b, a)) {
            (true, None) => Some(format!("{} . {} missing", c2n(b), c2n(a))),
            (false, Some(_)) => Some(format!("{} . {} defined but not composable", c2n(b), c2n(a))),
            (true, Some(r)) if t.cells2[r].src != t.cells2[a].src || t.cells2[r].tgt != t.cells2[b].tgt => {
                Some(format!("{} . {} = {} has the wrong type", c2n(b), c2n(a), c2n(r)))
            }
            _ => None,
        }
    }))
    .or_else(|| {
        first((0..n2).filter_map(|a| {
            let (s, g) = (t.cells2[a].src, t.cells2[a].tgt);
            (t.v(a, t.id2[s]) != Some(a) || t.v(t.id2[g], a) != Some(a))
                .then(|| format!("unit law fails at {}", c2n(a)))
        }))
    })
    .or_else(|| {
        let mut w = None;
        'outer: for a in 0..n2 {
            for b in (0..n2).filter(|&b| t.cells2[b].src == t.cells2[a].tgt) {
                for c in (0..n2).filter(|&c| t.cells2[c].src == t.cells2[b].tgt) {
                    let l = t.v(c, b).and_then(|cb| t.v(cb, a));
                    let r = t.v(b, a).and_then(|ba| t.v(c, ba));
                    if l != r {
                        w = Some(format!("vertical associativity fails at ({}, {}, {})", c2n(c), c2n(b), c2n(a)));
                        break 'outer;
                    }
                }
            }
        }
        w
    });

    // Horizontal: 1-cells form a category; * on 2-cells is typed,
    // associative, unital, and preserves identities.
    let composable1 = |g: usize, f: usize| t.cells1[f].cod == t.cells1[g].dom;
    let horizontal = first((0..n1).flat_map(|g| (0..n1).map(move |f| (g, f))).filter_map(|(g, f)| {
        match (composable1(g, f), t.c1(g, f)) {
            (true, None) => Some(format!("{} . {} missing", c1n(g), c1n(f))),
            (false, Some(_)) => Some(format!("{} . {} defined but not composable", c1n(g), c1n(f))),
            (true, Some(r)) if t.cells1[r].dom != t.cells1[f].dom || t.cells1[r].cod != t.cells1[g].cod => {
                Some(format!("{} . {} has the wrong type", c1n(g), c1n(f)))
            }
            _ => None,
        }
    }))
    .or_else(|| {
        first((0..n1).filter_map(|f| {
            let (a, b) = (t.cells1[f].dom, t.cells1[f].cod);
            (t.c1(f, t.id1[a]) != Some(f) || t.c1(t.id1[b], f) != Some(f))
                .then(|| format!("unit law fails at {}", c1n(f)))
        }))
    })
    .or_else(|| {
        let mut w = None;
        'o1: for f in 0..n1 {
            for g in (0..n1).filter(|&g| composable1(g, f)) {
                for h in (0..n1).filter(|&h| composable1(h, g)) {
                    if t.c1(h, g).and_then(|hg| t.c1(hg, f)) != t.c1(g, f).and_then(|gf| t.c1(h, gf)) {
                        w = Some(format!("associativity fails at ({}, {}, {})", c1n(h), c1n(g), c1n(f)));
                        break 'o1;
                    }
                }
            }
        }
        w
    })
    .or_else(|| {
        first((0..n2).flat_map(|b| (0..n2).map(move |a| (b, a))).filter_map(|(b, a)| {
            let ok = t.cod2(a) == t.dom2(b);
            match (ok, t.h(b, a)) {
                (true, None) => Some(format!("{} * {} missing", c2n(b), c2n(a))),
                (false, Some(_)) => Some(format!("{} * {} defined but not composable", c2n(b), c2n(a))),
                (true, Some(r)) => {
                    let (ca, cb, cr) = (&t.cells2[a], &t.cells2[b], &t.cells2[r]);
                    (Some(cr.src) != t.c1(cb.src, ca.src) || Some(cr.tgt) != t.c1(cb.tgt, ca.tgt))
                        .then(|| format!("{} * {} = {} has the wrong type", c2n(b), c2n(a), c2n(r)))
                }
                _ => None,
            }
        }))
    })
    .or_else(|| {
        first((0..n2).filter_map(|a| {
            let (x, y) = (t.dom2(a), t.cod2(a));
            let (ix, iy) = (t.id2[t.id1[x]], t.id2[t.id1[y]]);
            (t.h(a, ix) != Some(a) || t.h(iy, a) != Some(a)).then(|| format!("Id_id is not a unit for {}", c2n(a)))
        }))
    })
    .or_else(|| {
        first((0..n1).flat_map(|g| (0..n1).map(move |f| (g, f))).filter(|&(g, f)| composable1(g, f)).filter_map(
            |(g, f)| {
                let gf = t.c1(g, f)?;
                (t.h(t.id2[g], t.id2[f]) != Some(t.id2[gf]))
                    .then(|| format!("Id_{} * Id_{} is not Id_{}", c1n(g), c1n(f), c1n(gf)))
            },
        ))
    })
    .or_else(|| {
        let mut w = None;
        'o2: for a in 0..n2 {
            for b in (0..n2).filter(|&b| t.dom2(b) == t.cod2(a)) {
                for c in (0..n2).filter(|&c| t.dom2(c) == t.cod2(b)) {
                    if t.h(c, b).and_then(|cb| t.h(cb, a)) != t.h(b, a).and_then(|ba| t.h(c, ba)) {
                        w = Some(format!("horizontal associativity fails at ({}, {}, {})", c2n(c), c2n(b), c2n(a)));
                        break 'o2;
                    }
                }
            }
        }
        w
    });

    let interchange = interchange_witness(t);
    TwoCatReport {
        clauses: vec![
            clause("shape", shape),
            clause("vertical", vertical),
            clause("horizontal", horizontal),
            clause("interchange", interchange),
        ],
    }
}

/// `(b' * b) . (a' * a) = (b' . a') * (b . a)` over all configurations.
fn interchange_witness(t: &TwoCat) -> Option<String> {
    let n2 = t.n2();
    let c2n = |a: usize| t.cells2[a].name.as_str();
    // Vertically composable pairs (a, b) with b . a, grouped by hom.
    let pairs: Vec<(usize, usize)> = (0..n2)
        .flat_map(|a| (0..n2).filter(move |&b| t.cells2[a].tgt == t.cells2[b].src).map(move |b| (a, b)))
        .collect();
    for &(a, b) in &pairs {
        for &(a2, b2) in pairs.iter().filter(|&&(a2, _)| t.dom2(a2) == t.cod2(a)) {
            let l = match (t.h(b2, b), t.h(a2, a)) {
                (Some(x), Some(y)) => t.v(x, y),
                _ => None,
            };
            let r = match (t.v(b2, a2), t.v(b, a)) {
                (Some(x), Some(y)) => t.h(x, y),
                _ => None,
            };
            if l != r || l.is_none() {
                return Some(format!(
                    "({} * {}) . ({} * {}) differs from ({} . {}) * ({} . {})",
                    c2n(b2),
                    c2n(b),
                    c2n(a2),
                    c2n(a),
                    c2n(b2),
                    c2n(a2),
                    c2n(b),
                    c2n(a)
                ));
            }
        }
    }
    None
}

/// Whiskering axioms and the agreement of `a' * a` with
/// `(g' a) . (a' f)` and `(a' g) . (f' a)`.
pub fn whisker_determination_check(t: &TwoCat) -> TwoCatReport {
    let n1 = t.n1();
    let n2 = t.n2();
    let c1n = |f: usize| t.cells1[f].name.as_str();
    let c2n = |a: usize| t.cells2[a].name.as_str();

    let identities = first(
        (0..n1)
            .flat_map(|g| (0..n1).map(move |f| (g, f)))
            .filter(|&(g, f)| t.cells1[f].cod == t.cells1[g].dom)
            .filter_map(|(g, f)| {
                let gf = t.c1(g, f)?;
                let want = Some(t.id2[gf]);
                (t.whisker_r(g, t.id2[f]) != want || t.whisker_l(t.id2[g], f) != want)
                    .then(|| format!("whiskering Id between {} and {} is not Id_{}", c1n(g), c1n(f), c1n(gf)))
            }),
    );

    let functorial = {
        let mut w = None;
        'o: for a in 0..n2 {
            for b in (0..n2).filter(|&b| t.cells2[b].src == t.cells2[a].tgt) {
                let ba = t.v(b, a);
                for l in (0..n1).filter(|&l| t.cells1[l].cod == t.dom2(a)) {
                    let lhs = match (t.whisker_l(b, l), t.whisker_l(a, l)) {
                        (Some(x), Some(y)) => t.v(x, y),
                        _ => None,
                    };
                    if lhs.is_none() || lhs != ba.and_then(|ba| t.whisker_l(ba, l)) {
                        w = Some(format!("({} . {}) {} is not the composite of the whiskers", c2n(b), c2n(a), c1n(l)));
                        break 'o;
                    }
                }
                for r in (0..n1).filter(|&r| t.cells1[r].dom == t.cod2(a)) {
                    let lhs = match (t.whisker_r(r, b), t.whisker_r(r, a)) {
                        (Some(x), Some(y)) => t.v(x, y),
                        _ => None,
                    };
                    if lhs.is_none() || lhs != ba.and_then(|ba| t.whisker_r(r, ba)) {
                        w = Some(format!("{} ({} . {}) is not the composite of the whiskers", c1n(r), c2n(b), c2n(a)));
                        break 'o;
                    }
                }
            }
        }
        w
    };

    let determined = {
        let mut w = None;
        'o2: for a in 0..n2 {
            for a2 in (0..n2).filter(|&a2| t.dom2(a2) == t.cod2(a)) {
                let (f, g) = (t.cells2[a].src, t.cells2[a].tgt);
                let (f2, g2) = (t.cells2[a2].src, t.cells2[a2].tgt);
                let one = match (t.whisker_r(g2, a), t.whisker_l(a2, f)) {
                    (Some(x), Some(y)) => t.v(x, y),
                    _ => None,
                };
                let two = match (t.whisker_l(a2, g), t.whisker_r(f2, a)) {
                    (Some(x), Some(y)) => t.v(x, y),
                    _ => None,
                };
                if one.is_none() || one != two {
                    w = Some(format!(
                        "(g' a) . (a' f) differs from (a' g) . (f' a) for a = {}, a' = {}",
                        c2n(a),
                        c2n(a2)
                    ));
                    break 'o2;
                }
                if one != t.h(a2, a) {
                    w = Some(format!("stored {} * {} differs from the whisker composite", c2n(a2), c2n(a)));
                    break 'o2;
                }
            }
        }
        w
    };

    TwoCatReport {
        clauses: vec![
            clause("identity whiskers", identities),
            clause("whisker functoriality", functorial),
            clause("whisker interchange", determined),
        ],
    }
}

/// Inverse of a 2-cell, if any.
pub fn inverse_2cell(t: &TwoCat, a: usize) -> Option<usize> {
    let (f, g) = (t.cells2[a].src, t.cells2[a].tgt);
    t.hom2(g, f).into_iter().find(|&b| t.v(b, a) == Some(t.id2[f]) && t.v(a, b) == Some(t.id2[g]))
}

/// Data exhibiting `f` as an equivalence: `g`, `unit: id => g f`, `counit: f g => id`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceWitness {
    pub inverse: usize,
    pub unit: usize,
    pub counit: usize,
}

pub fn is_equivalence_1cell(t: &TwoCat, f: usize) -> Option<EquivalenceWitness> {
    let (x, y) = (t.cells1[f].dom, t.cells1[f].cod);
    for g in t.hom1(y, x) {
        let (Some(gf), Some(fg)) = (t.c1(g, f), t.c1(f, g)) else { continue };
        let unit = t.hom2(t.id1[x], gf).into_iter().find(|&a| inverse_2cell(t, a).is_some());
        let counit = t.hom2(fg, t.id1[y]).into_iter().find(|&a| inverse_2cell(t, a).is_some());
        if let (Some(unit), Some(counit)) = (unit, counit) {
            return Some(EquivalenceWitness { inverse: g, unit, counit });
        }
    }
    None
}

/// Object, 1-cell and 2-cell maps of a strict 2-functor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TwoFunctor {
    pub omap: Vec<Obj>,
    pub map1: Vec<usize>,
    pub map2: Vec<usize>,
}

impl TwoFunctor {
    /// `self` after `first`.
    pub fn after(&self, first: &TwoFunctor) -> TwoFunctor {
        TwoFunctor {
            omap: first.omap.iter().map(|&o| self.omap[o]).collect(),
            map1: first.map1.iter().map(|&f| self.map1[f]).collect(),
            map2: first.map2.iter().map(|&a| self.map2[a]).collect(),
        }
    }

    /// A functor into `x` seen as a 2-functor into `TwoCat::discrete(x)`;
    /// `None` if it separates the ends of some 2-cell.
    pub fn into_discrete(t: &TwoCat, omap: Vec<Obj>, map1: Vec<Mor>) -> Option<TwoFunctor> {
        let mut map2 = Vec::with_capacity(t.n2());
        for c in &t.cells2 {
            if map1[c.src] != map1[c.tgt] {
                return None;
            }
            map2.push(map1[c.src]);
        }
        Some(TwoFunctor { omap, map1, map2 })
    }
}

/// Exhaustive check of typing and preservation of identities and of both compositions.
pub fn validate_twofunctor(src: &TwoCat, tgt: &TwoCat, f: &TwoFunctor) -> std::result::Result<(), String> {
    if f.omap.len() != src.objects.len() || f.map1.len() != src.n1() || f.map2.len() != src.n2() {
        return Err("map sizes do not match the source".into());
    }
    for (i, c) in src.cells1.iter().enumerate() {
        let d = &tgt.cells1[f.map1[i]];
        if d.dom != f.omap[c.dom] || d.cod != f.omap[c.cod] {
            return Err(format!("1-cell {} is sent to {} with the wrong ends", c.name, d.name));
        }
    }
    for (i, c) in src.cells2.iter().enumerate() {
        let d = &tgt.cells2[f.map2[i]];
        if d.src != f.map1[c.src] || d.tgt != f.map1[c.tgt] {
            return Err(format!("2-cell {} is sent to {} with the wrong ends", c.name, d.name));
        }
    }
    for (o, &i) in src.id1.iter().enumerate() {
        if f.map1[i] != tgt.id1[f.omap[o]] {
            return Err(format!("identity of {} not preserved", src.objects[o]));
        }
    }
    for (g, &i) in src.id2.iter().enumerate() {
        if f.map2[i] != tgt.id2[f.map1[g]] {
            return Err(format!("Id_{} not preserved", src.cells1[g].name));
        }
    }
    let n1 = src.n1();
    for g in 0..n1 {
        for ff in 0..n1 {
            if let Some(h) = src.c1(g, ff) {
                if tgt.c1(f.map1[g], f.map1[ff]) != Some(f.map1[h]) {
                    return Err(format!("{} . {} not preserved", src.cells1[g].name, src.cells1[ff].name));
                }
            }
        }
    }
    let n2 = src.n2();
    for b in 0..n2 {
        for a in 0..n2 {
            if let Some(r) = src.v(b, a) {
                if tgt.v(f.map2[b], f.map2[a]) != Some(f.map2[r]) {
                    return Err(format!("{} . {} not preserved", src.cells2[b].name, src.cells2[a].name));
                }
            }
            if let Some(r) = src.h(b, a) {
                if tgt.h(f.map2[b], f.map2[a]) != Some(f.map2[r]) {
                    return Err(format!("{} * {} not preserved", src.cells2[b].name, src.cells2[a].name));
                }
            }
        }
    }
    Ok(())
}

/// `pi0(T)` with the quotient map on 1-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi0 {
    pub cat: FinCat,
    /// Morphism of `cat` for every 1-cell.
    pub class_of: Vec<Mor>,
}

impl Pi0 {
    /// Members of the class of morphism `m`.
    pub fn members(&self, m: Mor) -> Vec<usize> {
        (0..self.class_of.len()).filter(|&f| self.class_of[f] == m).collect()
    }
}

/// Connected components of the hom-categories; composition is induced and
/// its well-definedness is checked on every representative pair.
pub fn pi0(t: &TwoCat) -> Result<Pi0> {
    let n1 = t.n1();
    let mut d = Dsu::new(n1);
    for c in &t.cells2 {
        d.union(c.src, c.tgt);
    }
    // Identity classes first, in object order, then the rest by least member.
    let mut roots: Vec<usize> = t.id1.iter().map(|&i| d.find(i)).collect();
    for f in 0..n1 {
        let r = d.find(f);
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    let class_of: Vec<Mor> = (0..n1).map(|f| roots.iter().position(|&r| r == d.root(f)).unwrap()).collect();
    let k = roots.len();
    let rep: Vec<usize> = (0..k).map(|m| (0..n1).find(|&f| class_of[f] == m).unwrap()).collect();
    let morphisms = (0..k)
        .map(|m| {
            let f = &t.cells1[rep[m]];
            let name = if m < t.id1.len() { t.cells1[t.id1[m]].name.clone() } else { format!("[{}]", f.name) };
            Morphism { name, dom: f.dom, cod: f.cod }
        })
        .collect();
    let mut comp = vec![None; k * k];
    for g in 0..n1 {
        for f in 0..n1 {
            if let Some(h) = t.c1(g, f) {
                let slot = &mut comp[class_of[g] * k + class_of[f]];
                match *slot {
                    None => *slot = Some(class_of[h]),
                    Some(prev) if prev != class_of[h] => {
                        return Err(Error::Math(format!(
                            "composition on components is ill-defined at {} . {}",
                            t.cells1[g].name, t.cells1[f].name
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    let cat =
        FinCat::from_parts(format!("pi0({})", t.name), t.objects.clone(), morphisms, (0..t.id1.len()).collect(), comp)?;
    Ok(Pi0 { cat, class_of })
}

/// The functor `pi0(S) -> pi0(T)` induced by a 2-functor.
pub fn pi0_map(src: &Pi0, tgt: &Pi0, f: &TwoFunctor) -> FinFunctor {
    let k = src.cat.num_morphisms();
    let mut mmap = vec![0; k];
    for (cell, &m) in src.class_of.iter().enumerate() {
        mmap[m] = tgt.class_of[f.map1[cell]];
    }
    FinFunctor { omap: f.omap.clone(), mmap }
}

/// Outcome of [`pi0_universal_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi0UniversalReport {
    /// The factoring functor `pi0(T) -> X`, when `F` is constant on components.
    pub factoring: Option<FinFunctor>,
    /// Number of functors `G: pi0(T) -> X` with `G . pi = F`.
    pub solutions: usize,
    pub note: Option<String>,
}

impl Pi0UniversalReport {
    pub fn pass(&self) -> bool {
        self.factoring.is_some() && self.solutions == 1
    }
}

/// Existence (by construction) and uniqueness (by exhaustive search) of
/// the factorization of `F: T -> discrete(X)` through `pi0(T)`.
pub fn pi0_universal_check(
    t: &TwoCat,
    p: &Pi0,
    x: &FinCat,
    f: &TwoFunctor,
    budget: &Budget,
) -> Result<Pi0UniversalReport> {
    let disc = TwoCat::discrete(x);
    if let Err(e) = validate_twofunctor(t, &disc, f) {
        return Ok(Pi0UniversalReport { factoring: None, solutions: 0, note: Some(format!("not a 2-functor: {e}")) });
    }
    let k = p.cat.num_morphisms();
    let mut mmap = vec![None; k];
    for (cell, &m) in p.class_of.iter().enumerate() {
        match mmap[m] {
            None => mmap[m] = Some(f.map1[cell]),
            Some(prev) if prev != f.map1[cell] => {
                return Ok(Pi0UniversalReport {
                    factoring: None,
                    solutions: 0,
                    note: Some(format!("F separates the component of {}", t.cells1[cell].name)),
                })
            }
            _ => {}
        }
    }
    let g = FinFunctor { omap: f.omap.clone(), mmap: mmap.into_iter().map(|m| m.unwrap()).collect() };
    if let Err(e) = validate_functor(&p.cat, x, &g) {
        return Ok(Pi0UniversalReport {
            factoring: None,
            solutions: 0,
            note: Some(format!("induced map is not a functor: {e}")),
        });
    }
    // Every functor G with G . pi = F: objects are fixed, each morphism
    // must hit the common image of its members.
    let solutions = enumerate_functors_where(&p.cat, x, budget, &|m, tm| {
        p.class_of.iter().enumerate().all(|(cell, &cm)| cm != m || f.map1[cell] == tm)
    })?
    .into_iter()
    .filter(|h| h.omap == f.omap)
    .count();
    Ok(Pi0UniversalReport { factoring: Some(g), solutions, note: None })
}

/// Counts functors `pi0(T) -> X` and 2-functors `T -> discrete(X)`; the
/// two sets correspond by precomposition with the quotient.
pub fn pi0_iso_counts(t: &TwoCat, p: &Pi0, x: &FinCat, budget: &Budget) -> Result<(usize, usize)> {
    let below = enumerate_functors(&p.cat, x, budget)?.len();
    let u = t.underlying()?;
    let above = enumerate_functors(&u, x, budget)?
        .into_iter()
        .filter(|f| TwoFunctor::into_discrete(t, f.omap.clone(), f.mmap.clone()).is_some())
        .count();
    Ok((below, above))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn groupoids() -> Vec<FinCat> {
        vec![fixtures::terminal(), fixtures::walking_iso(), fixtures::cyclic_group(2)]
    }

    #[test]
    fn discrete_and_indiscrete_are_valid() {
        for c in [fixtures::walking_homotopy(), fixtures::lattice_2x2(), fixtures::walking_equivalence_1cat()] {
            let d = TwoCat::discrete(&c);
            assert!(validate_twocat(&d).is_valid(), "{}", validate_twocat(&d));
            assert!(whisker_determination_check(&d).is_valid());
            let i = TwoCat::indiscrete(&c);
            assert!(validate_twocat(&i).is_valid(), "{}", validate_twocat(&i));
            assert!(whisker_determination_check(&i).is_valid());
        }
    }

    #[test]
    fn cat_of_groupoids_is_valid() {
        let t = TwoCat::of_categories("G", &groupoids(), &Budget::unlimited()).unwrap();
        let r = validate_twocat(&t);
        assert!(r.is_valid(), "{r}");
        assert!(whisker_determination_check(&t).is_valid());
        // J -> 1 is an equivalence; 1 -> J picks an object.
        let p = (0..t.n1()).find(|&f| t.cells1[f].dom == 1 && t.cells1[f].cod == 0).unwrap();
        assert!(is_equivalence_1cell(&t, p).is_some());
        // hom(1, J) is the indiscrete groupoid on two objects.
        let (h, ones, twos) = t.hom_category(0, 1).unwrap();
        assert_eq!((ones.len(), twos.len()), (2, 4));
        // hom(J, Z2) has two functors, each with two automorphisms and two
        // transformations to the other.
        let (_, ones, twos) = t.hom_category(1, 2).unwrap();
        assert_eq!((ones.len(), twos.len()), (2, 8));
        assert!(crate::fincat::validate_category(&h).is_empty());
    }

    #[test]
    fn broken_interchange_is_reported() {
        let mut t = TwoCat::of_categories("G", &groupoids(), &Budget::unlimited()).unwrap();
        // Re-point one horizontal composite of non-identity cells.
        let n2 = t.n2();
        let (b, a) = (0..n2)
            .flat_map(|b| (0..n2).map(move |a| (b, a)))
            .find(|&(b, a)| {
                !t.is_identity2(a)
                    && !t.is_identity2(b)
                    && t.h(b, a).is_some_and(|r| t.hom2(t.cells2[r].src, t.cells2[r].tgt).len() > 1)
            })
            .unwrap();
        let r = t.h(b, a).unwrap();
        let alt = t.hom2(t.cells2[r].src, t.cells2[r].tgt).into_iter().find(|&x| x != r).unwrap();
        t.hcomp[b * n2 + a] = Some(alt);
        assert!(!validate_twocat(&t).is_valid());
        assert!(
            !whisker_determination_check(&t).is_valid() || !validate_twocat(&t).clause("interchange").unwrap().pass
        );
    }

    #[test]
    fn pi0_of_discrete_is_the_category() {
        let c = fixtures::walking_homotopy();
        let p = pi0(&TwoCat::discrete(&c)).unwrap();
        assert_eq!(p.cat.num_morphisms(), c.num_morphisms());
        assert!(crate::fincat::validate_category(&p.cat).is_empty());
    }

    #[test]
    fn pi0_of_indiscrete_collapses_parallel_arrows() {
        let c = fixtures::walking_homotopy();
        let p = pi0(&TwoCat::indiscrete(&c)).unwrap();
        let (x, y) = (c.find_object("X").unwrap(), c.find_object("Y").unwrap());
        assert_eq!(p.cat.hom(x, y).len(), 1);
        assert!(crate::fincat::validate_category(&p.cat).is_empty());
    }

    #[test]
    fn pi0_universal_on_discrete() {
        let c = fixtures::chain(1);
        let t = TwoCat::discrete(&c);
        let p = pi0(&t).unwrap();
        for f in enumerate_functors(&c, &fixtures::walking_iso(), &Budget::unlimited()).unwrap() {
            let tf = TwoFunctor::into_discrete(&t, f.omap.clone(), f.mmap.clone()).unwrap();
            let r = pi0_universal_check(&t, &p, &fixtures::walking_iso(), &tf, &Budget::unlimited()).unwrap();
            assert!(r.pass());
            assert_eq!(r.factoring.unwrap(), f);
        }
        let (a, b) = pi0_iso_counts(&t, &p, &fixtures::walking_iso(), &Budget::unlimited()).unwrap();
        assert_eq!(a, b);
    }
}
