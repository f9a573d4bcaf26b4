//! The homotopy 2-category.
//!
//! 2-cells are classes of homotopies. Classes start from the germ relation
//! and are closed under the laws every probe 2-functor respects (units,
//! inverses, whiskering, interchange, cancellation of `Sigma`-whiskers).
//! Probes evaluate the result from above; replacements and the localizing
//! functor `q` live here too.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::factorizations;
use crate::fincat::{
    enumerate_functors_where, initial, terminal, unique_arrow, validate_functor, validate_nat_transf, FinCat,
    FinFunctor, Mor, MorSet, NatTransf, Obj,
};
use crate::fixtures;
use crate::homotopy::{
    all_homotopies, compose_vertical, enumerate_homotopies, germ_partition, invert, is_q_cylinder, to_q_homotopy,
    whisker_left, whisker_right, Cylinder, Homotopy,
};
use crate::model::{cofibrant_objects, fc_objects, fibrant_objects, validate_model, ModelStructure};
use crate::search::Budget;
use crate::twocat::{
    is_equivalence_1cell, nat_transfs, pi0, pi0_universal_check, validate_twofunctor, Cell1, Cell2, EquivalenceWitness,
    TwoCat, TwoFunctor,
};
use crate::util::Dsu;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HoMode {
    /// All objects, homotopies relative to a class `Sigma`.
    Sigma,
    /// Fibrant-cofibrant objects of a model structure, `Sigma = W`.
    Model,
}

#[derive(Clone, Debug)]
pub struct HoOptions {
    pub max_rounds: usize,
}

impl Default for HoOptions {
    fn default() -> Self {
        HoOptions { max_rounds: 8 }
    }
}

/// A node of the saturation: a generator, an identity, or the vertical
/// composite `b . a` of two classes (given by node ids).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Term {
    Gen(usize),
    Id(Mor),
    Comp(usize, usize),
}

/// Outcome of [`build_ho`] / [`build_ho_sigma`].
#[derive(Clone, Debug)]
pub struct HoPresentation {
    pub mode: HoMode,
    pub base: FinCat,
    pub sigma: MorSet,
    /// Base objects, in the order of `two.objects`.
    pub objects: Vec<Obj>,
    /// Base morphism of every 1-cell.
    pub cells1: Vec<Mor>,
    pub generators: Vec<Homotopy>,
    pub terms: Vec<Term>,
    /// 2-cell of every term (class label when not closed).
    pub term_cell: Vec<usize>,
    /// Readable representative of every 2-cell.
    pub reprs: Vec<String>,
    /// The resulting 2-category; `None` when saturation hit the round bound.
    pub two: Option<TwoCat>,
    pub closed: bool,
    pub rounds: usize,
    /// One line per merge: rule and the two class ids.
    pub log: Vec<String>,
}

impl HoPresentation {
    pub fn two(&self) -> Result<&TwoCat> {
        self.two.as_ref().ok_or_else(|| Error::Math("saturation undecided at the round bound".into()))
    }

    /// 1-cell of a base morphism.
    pub fn cell1_of(&self, m: Mor) -> Option<usize> {
        self.cells1.iter().position(|&x| x == m)
    }

    /// 2-cell of generator `i`.
    pub fn generator_cell(&self, i: usize) -> usize {
        let n = self.terms.iter().position(|t| *t == Term::Gen(i)).expect("every generator has a term");
        self.term_cell[n]
    }

    /// 2-cell class of a homotopy between 1-cells of the presentation.
    pub fn cell_of(&self, h: &Homotopy) -> Option<usize> {
        self.generators.iter().position(|g| g == h).map(|i| self.generator_cell(i))
    }

    /// 2-cells `f => g` between base morphisms.
    pub fn cells_between(&self, f: Mor, g: Mor) -> Result<Vec<usize>> {
        let t = self.two()?;
        match (self.cell1_of(f), self.cell1_of(g)) {
            (Some(a), Some(b)) => Ok(t.hom2(a, b)),
            _ => Err(Error::Input(format!(
                "{} or {} is not a 1-cell of the presentation",
                self.base.mor_name(f),
                self.base.mor_name(g)
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    /// `class . l`
    Pre(Mor),
    /// `r . class`
    Post(Mor),
}

struct Engine<'a> {
    c: &'a FinCat,
    cells1: Vec<Mor>,
    cancel: Vec<Mor>,
    gens: Vec<Homotopy>,
    gen_index: HashMap<Homotopy, usize>,
    terms: Vec<Term>,
    ends: Vec<(Mor, Mor)>,
    dsu: Dsu,
    memo: HashMap<Term, usize>,
    wmemo: HashMap<(usize, Side), usize>,
    log: Vec<String>,
}

impl<'a> Engine<'a> {
    fn new(c: &'a FinCat, cells1: Vec<Mor>, cancel: Vec<Mor>, gens: Vec<Homotopy>) -> Self {
        let gen_index = gens.iter().enumerate().map(|(i, h)| (*h, i)).collect();
        Engine {
            c,
            cells1,
            cancel,
            gens,
            gen_index,
            terms: Vec::new(),
            ends: Vec::new(),
            dsu: Dsu::new(0),
            memo: HashMap::new(),
            wmemo: HashMap::new(),
            log: Vec::new(),
        }
    }

    fn canon(&mut self, t: Term) -> Term {
        match t {
            Term::Comp(b, a) => Term::Comp(self.dsu.find(b), self.dsu.find(a)),
            t => t,
        }
    }

    fn add(&mut self, t: Term) -> usize {
        let t = self.canon(t);
        if let Some(&n) = self.memo.get(&t) {
            return self.dsu.find(n);
        }
        let ends = match t {
            Term::Gen(i) => (self.gens[i].f, self.gens[i].g),
            Term::Id(f) => (f, f),
            Term::Comp(b, a) => {
                debug_assert_eq!(self.ends[a].1, self.ends[b].0);
                (self.ends[a].0, self.ends[b].1)
            }
        };
        let n = self.terms.len();
        self.terms.push(t);
        self.ends.push(ends);
        self.dsu.push();
        self.memo.insert(t, n);
        n
    }

    fn merge(&mut self, a: usize, b: usize, rule: &str) -> bool {
        let (ra, rb) = (self.dsu.find(a), self.dsu.find(b));
        if ra == rb {
            return false;
        }
        self.dsu.union(ra, rb);
        self.log.push(format!("{rule} {} {}", ra.min(rb), ra.max(rb)));
        true
    }

    fn gen_of(&mut self, h: Homotopy) -> Result<usize> {
        match self.gen_index.get(&h) {
            Some(&i) => Ok(self.add(Term::Gen(i))),
            None => Err(Error::Math(format!("whiskered homotopy {} is missing from the generators", h.show(self.c)))),
        }
    }

    /// Whisker of a single term, with children read as classes.
    fn whisker_term(&mut self, t: Term, side: Side) -> Result<usize> {
        match t {
            Term::Gen(i) => {
                let h = match side {
                    Side::Pre(l) => whisker_left(self.c, &self.gens[i], l)?,
                    Side::Post(r) => whisker_right(self.c, r, &self.gens[i])?,
                };
                self.gen_of(h)
            }
            Term::Id(f) => {
                let g = match side {
                    Side::Pre(l) => self.c.compose(f, l),
                    Side::Post(r) => self.c.compose(r, f),
                };
                Ok(self.add(Term::Id(g)))
            }
            Term::Comp(b, a) => {
                let (b, a) = (self.dsu.find(b), self.dsu.find(a));
                let wb = self.whisker(b, side)?;
                let wa = self.whisker(a, side)?;
                Ok(self.add(Term::Comp(wb, wa)))
            }
        }
    }

    /// Whisker of a class, computed from its least term. Children of a
    /// composite are older than the composite, so the recursion ends.
    fn whisker(&mut self, k: usize, side: Side) -> Result<usize> {
        let k = self.dsu.find(k);
        if let Some(&r) = self.wmemo.get(&(k, side)) {
            return Ok(self.dsu.find(r));
        }
        let r = self.whisker_term(self.terms[k], side)?;
        self.wmemo.insert((k, side), r);
        Ok(r)
    }

    fn sides(&self, k: usize) -> Vec<Side> {
        let (f, _) = self.ends[k];
        let (x, y) = (self.c.dom(f), self.c.cod(f));
        let mut out: Vec<Side> = self.cells1.iter().filter(|&&l| self.c.cod(l) == x).map(|&l| Side::Pre(l)).collect();
        out.extend(self.cells1.iter().filter(|&&r| self.c.dom(r) == y).map(|&r| Side::Post(r)));
        out
    }

    fn roots(&mut self) -> Vec<usize> {
        (0..self.terms.len()).filter(|&n| self.dsu.find(n) == n).collect()
    }

    /// Restores the hash-consing invariant after merges.
    fn rebuild(&mut self) {
        loop {
            let mut changed = false;
            self.memo.clear();
            for n in 0..self.terms.len() {
                let t = self.canon(self.terms[n]);
                match self.memo.get(&t) {
                    Some(&m) => {
                        if self.merge(m, n, "congruence") {
                            changed = true;
                        }
                    }
                    None => {
                        self.memo.insert(t, n);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.wmemo.clear();
    }

    fn apply(&mut self, pending: Vec<(usize, usize, &'static str)>) -> bool {
        let mut any = false;
        for (a, b, rule) in pending {
            any |= self.merge(a, b, rule);
        }
        self.rebuild();
        any
    }

    /// One saturation round; returns whether anything changed.
    fn round(&mut self) -> Result<bool> {
        let n0 = self.terms.len();
        self.wmemo.clear();
        let roots = self.roots();
        let mut by_src: BTreeMap<Mor, Vec<usize>> = BTreeMap::new();
        for &k in &roots {
            by_src.entry(self.ends[k].0).or_default().push(k);
        }
        let mut pending: Vec<(usize, usize, &'static str)> = Vec::new();
        for &a in &roots {
            let (f, g) = self.ends[a];
            let idf = self.add(Term::Id(f));
            let idg = self.add(Term::Id(g));
            let l = self.add(Term::Comp(a, idf));
            let r = self.add(Term::Comp(idg, a));
            pending.push((l, a, "unit"));
            pending.push((r, a, "unit"));
            let next: Vec<usize> = by_src.get(&g).cloned().unwrap_or_default();
            for &b in &next {
                let ba = self.add(Term::Comp(b, a));
                let after: Vec<usize> = by_src.get(&self.ends[b].1).cloned().unwrap_or_default();
                for &cc in &after {
                    let cb = self.add(Term::Comp(cc, b));
                    let x = self.add(Term::Comp(cc, ba));
                    let y = self.add(Term::Comp(cb, a));
                    pending.push((x, y, "associativity"));
                }
            }
        }
        // Whiskers of every term agree with the whisker of its class.
        for n in 0..n0 {
            let k = self.dsu.find(n);
            for side in self.sides(k) {
                let w = self.whisker(k, side)?;
                if n != k {
                    let t = self.terms[n];
                    let wn = self.whisker_term(t, side)?;
                    pending.push((w, wn, "whisker"));
                }
            }
        }
        // (g' a) . (b f) = (b f') . (g a) for a: f => f', b: g => g'.
        for &a in &roots {
            let (f, f1) = self.ends[a];
            let y = self.c.cod(f);
            for &b in &roots {
                let (g, g1) = self.ends[b];
                if self.c.dom(g) != y {
                    continue;
                }
                let ga1 = self.whisker(a, Side::Post(g1))?;
                let bf = self.whisker(b, Side::Pre(f))?;
                let bf1 = self.whisker(b, Side::Pre(f1))?;
                let ga = self.whisker(a, Side::Post(g))?;
                let lhs = self.add(Term::Comp(ga1, bf));
                let rhs = self.add(Term::Comp(bf1, ga));
                pending.push((lhs, rhs, "interchange"));
            }
        }
        // Whiskering by a member of Sigma is injective on 2-cells.
        let mut hom: BTreeMap<(Mor, Mor), Vec<usize>> = BTreeMap::new();
        for &k in &roots {
            hom.entry(self.ends[k]).or_default().push(k);
        }
        let cancel = self.cancel.clone();
        for ks in hom.values() {
            if ks.len() < 2 {
                continue;
            }
            let f = self.ends[ks[0]].0;
            let (x, y) = (self.c.dom(f), self.c.cod(f));
            for &s in &cancel {
                let mut sides = Vec::new();
                if self.c.dom(s) == y {
                    sides.push(Side::Post(s));
                }
                if self.c.cod(s) == x {
                    sides.push(Side::Pre(s));
                }
                for side in sides {
                    let mut seen: HashMap<usize, usize> = HashMap::new();
                    for &k in ks {
                        let w = self.whisker(k, side)?;
                        match seen.get(&w) {
                            Some(&k0) => pending.push((k0, k, "cancel")),
                            None => {
                                seen.insert(w, k);
                            }
                        }
                    }
                }
            }
        }
        let merged = self.apply(pending);
        Ok(merged || self.terms.len() != n0)
    }
}

fn morphisms_between(c: &FinCat, objs: &BTreeSet<Obj>) -> Vec<Mor> {
    c.morphisms().filter(|&m| objs.contains(&c.dom(m)) && objs.contains(&c.cod(m))).collect()
}

/// Seeds generators, identities, the germ relation, trivial homotopies and
/// inverse laws.
fn seed(e: &mut Engine) {
    let c = e.c;
    for i in 0..e.gens.len() {
        e.add(Term::Gen(i));
    }
    for &f in &e.cells1.clone() {
        e.add(Term::Id(f));
    }
    let mut groups: BTreeMap<(Mor, Mor), Vec<usize>> = BTreeMap::new();
    for (i, h) in e.gens.iter().enumerate() {
        groups.entry((h.f, h.g)).or_default().push(i);
    }
    let mut pending = Vec::new();
    for idx in groups.values() {
        let hs: Vec<Homotopy> = idx.iter().map(|&i| e.gens[i]).collect();
        let labels = germ_partition(c, &hs);
        let mut first: HashMap<usize, usize> = HashMap::new();
        for (j, &lab) in labels.iter().enumerate() {
            match first.get(&lab) {
                Some(&i0) => pending.push((i0, idx[j], "germ")),
                None => {
                    first.insert(lab, idx[j]);
                }
            }
        }
    }
    for i in 0..e.gens.len() {
        let h = e.gens[i];
        if h.is_trivial(c) {
            let id = e.add(Term::Id(h.f));
            pending.push((i, id, "trivial"));
        }
        if let Some(&j) = e.gen_index.get(&invert(&h)) {
            let idf = e.add(Term::Id(h.f));
            let idg = e.add(Term::Id(h.g));
            let ji = e.add(Term::Comp(j, i));
            let ij = e.add(Term::Comp(i, j));
            pending.push((ji, idf, "inverse"));
            pending.push((ij, idg, "inverse"));
        }
    }
    e.apply(pending);
}

fn saturate(e: &mut Engine, opts: &HoOptions, budget: &Budget) -> Result<(bool, usize)> {
    for r in 1..=opts.max_rounds {
        budget.charge("saturation round", e.terms.len() as u64)?;
        if !e.round()? {
            return Ok((true, r));
        }
    }
    Ok((false, opts.max_rounds))
}

fn finish(
    e: &mut Engine,
    mode: HoMode,
    sigma: MorSet,
    objects: Vec<Obj>,
    closed: bool,
    rounds: usize,
) -> Result<HoPresentation> {
    let c = e.c;
    let cells1 = e.cells1.clone();
    let pos1: HashMap<Mor, usize> = cells1.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let roots = e.roots();
    let mut keyed: Vec<(usize, usize, bool, usize)> = roots
        .iter()
        .map(|&k| {
            let (f, g) = e.ends[k];
            let is_id = f == g && e.memo.get(&Term::Id(f)).map(|&n| e.dsu.find(n)) == Some(k);
            (pos1[&f], pos1[&g], !is_id, k)
        })
        .collect();
    keyed.sort();
    let cell_of_root: HashMap<usize, usize> = keyed.iter().enumerate().map(|(i, x)| (x.3, i)).collect();
    let term_cell: Vec<usize> = (0..e.terms.len()).map(|n| cell_of_root[&e.dsu.find(n)]).collect();
    let mut names = Vec::with_capacity(keyed.len());
    let mut counter: HashMap<(usize, usize), usize> = HashMap::new();
    for &(a, b, non_id, _) in &keyed {
        if !non_id {
            names.push(format!("Id_{}", c.mor_name(cells1[a])));
        } else {
            let k = counter.entry((a, b)).or_insert(0);
            names.push(format!("{}=>{}/{}", c.mor_name(cells1[a]), c.mor_name(cells1[b]), k));
            *k += 1;
        }
    }
    let reprs: Vec<String> = keyed
        .iter()
        .map(|&(_, _, _, k)| match e.terms[k] {
            Term::Gen(i) => e.gens[i].show(c),
            Term::Id(f) => format!("Id_{}", c.mor_name(f)),
            Term::Comp(b, a) => format!("{} . {}", names[term_cell[b]], names[term_cell[a]]),
        })
        .collect();
    let two = if closed {
        let n0 = e.terms.len();
        let two = assemble(e, &objects, &pos1, &keyed, &cell_of_root, &names)?;
        if e.terms.len() != n0 {
            return Err(Error::Math("saturation reported closed but composites are missing".into()));
        }
        Some(two)
    } else {
        None
    };
    Ok(HoPresentation {
        mode,
        base: c.clone(),
        sigma,
        objects,
        cells1,
        generators: e.gens.clone(),
        terms: e.terms.clone(),
        term_cell,
        reprs,
        two,
        closed,
        rounds,
        log: e.log.clone(),
    })
}

fn assemble(
    e: &mut Engine,
    objects: &[Obj],
    pos1: &HashMap<Mor, usize>,
    keyed: &[(usize, usize, bool, usize)],
    cell_of_root: &HashMap<usize, usize>,
    names: &[String],
) -> Result<TwoCat> {
    let c = e.c;
    let opos: HashMap<Obj, usize> = objects.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    let cells1: Vec<Cell1> = e
        .cells1
        .iter()
        .map(|&m| Cell1 { name: c.mor_name(m).to_string(), dom: opos[&c.dom(m)], cod: opos[&c.cod(m)] })
        .collect();
    let n1 = cells1.len();
    let mut comp1 = vec![None; n1 * n1];
    for (gi, &g) in e.cells1.iter().enumerate() {
        for (fi, &f) in e.cells1.iter().enumerate() {
            if let Some(h) = c.try_compose(g, f) {
                comp1[gi * n1 + fi] = Some(pos1[&h]);
            }
        }
    }
    let id1: Vec<usize> = objects.iter().map(|&o| pos1[&c.id(o)]).collect();
    let cells2: Vec<Cell2> =
        keyed.iter().zip(names).map(|(&(a, b, _, _), n)| Cell2 { name: n.clone(), src: a, tgt: b }).collect();
    let n2 = cells2.len();
    let mut id2 = vec![0; n1];
    for (i, &f) in e.cells1.clone().iter().enumerate() {
        let k = e.add(Term::Id(f));
        id2[i] = cell_of_root[&k];
    }
    let mut vcomp = vec![None; n2 * n2];
    let mut hcomp = vec![None; n2 * n2];
    for (bi, &(bs, bt, _, b)) in keyed.iter().enumerate() {
        for (ai, &(as_, at, _, a)) in keyed.iter().enumerate() {
            if at == bs {
                let k = e.add(Term::Comp(b, a));
                vcomp[bi * n2 + ai] = Some(cell_of_root[&e.dsu.find(k)]);
            }
            let (f, g1) = (e.cells1[as_], e.cells1[bt]);
            if c.cod(f) == c.dom(e.cells1[bs]) {
                let ga1 = e.whisker(a, Side::Post(g1))?;
                let bf = e.whisker(b, Side::Pre(f))?;
                let k = e.add(Term::Comp(ga1, bf));
                let cell = cell_of_root
                    .get(&e.dsu.find(k))
                    .copied()
                    .ok_or_else(|| Error::Math("horizontal composite outside the saturated classes".into()))?;
                hcomp[bi * n2 + ai] = Some(cell);
            }
        }
    }
    Ok(TwoCat {
        name: format!("Ho({})", c.name()),
        objects: objects.iter().map(|&o| c.object_name(o).to_string()).collect(),
        cells1,
        id1,
        comp1,
        cells2,
        id2,
        vcomp,
        hcomp,
    })
}

/// The 2-category `H(C, Sigma)`: every object, every morphism, 2-cells
/// generated by homotopies relative to `sigma`.
pub fn build_ho_sigma(c: &FinCat, sigma: &MorSet, opts: &HoOptions, budget: &Budget) -> Result<HoPresentation> {
    let gens = all_homotopies(c, sigma, budget)?;
    let cells1: Vec<Mor> = c.morphisms().collect();
    let cancel: Vec<Mor> = sigma.iter().copied().filter(|&s| !c.is_identity(s)).collect();
    let mut e = Engine::new(c, cells1, cancel, gens);
    seed(&mut e);
    let (closed, rounds) = saturate(&mut e, opts, budget)?;
    finish(&mut e, HoMode::Sigma, sigma.clone(), c.objects().collect(), closed, rounds)
}

/// `Ho` of a valid model structure on its fibrant-cofibrant objects.
/// Generators are the homotopies relative to `W` between morphisms of
/// `C_fc`; q-normalization and the gluing of q-homotopies are added to
/// the seed relations.
pub fn build_ho(m: &ModelStructure, opts: &HoOptions, budget: &Budget) -> Result<HoPresentation> {
    let report = validate_model(m);
    if !report.is_valid() {
        return Err(Error::Precondition(format!("{} is not a model structure: {}", m.name, report.summary())));
    }
    let c = &m.base;
    let fc = fc_objects(m)?;
    let cells1 = morphisms_between(c, &fc);
    let in_fc: BTreeSet<Mor> = cells1.iter().copied().collect();
    let gens: Vec<Homotopy> =
        all_homotopies(c, &m.w, budget)?.into_iter().filter(|h| in_fc.contains(&h.f) && in_fc.contains(&h.g)).collect();
    let cancel: Vec<Mor> = cells1.iter().copied().filter(|s| m.w.contains(s) && !c.is_identity(*s)).collect();
    let mut e = Engine::new(c, cells1, cancel, gens.clone());
    seed(&mut e);
    let mut pending = Vec::new();
    for (i, h) in gens.iter().enumerate() {
        let out = to_q_homotopy(m, h)?.output;
        if let Some(&j) = e.gen_index.get(&out) {
            pending.push((i, j, "normalize"));
        }
    }
    let q: Vec<usize> =
        (0..gens.len()).filter(|&i| is_q_cylinder(m, &gens[i].cyl).map(|x| x.is_some()).unwrap_or(false)).collect();
    for &i in &q {
        for &j in &q {
            if gens[i].g != gens[j].f || gens[i].cyl.src != gens[j].cyl.src {
                continue;
            }
            let glued = compose_vertical(m, &gens[i], &gens[j])?;
            if let Some(&k) = e.gen_index.get(&glued) {
                let comp = e.add(Term::Comp(j, i));
                pending.push((comp, k, "glue"));
            }
        }
    }
    e.apply(pending);
    let (closed, rounds) = saturate(&mut e, opts, budget)?;
    finish(&mut e, HoMode::Model, m.w.clone(), fc.into_iter().collect(), closed, rounds)
}

/// A functor from the base category into the underlying category of a
/// finite 2-category, sending `Sigma` to certified equivalences.
#[derive(Clone, Debug, Serialize)]
pub struct Probe {
    pub name: String,
    /// Index into [`ProbeSuite::targets`].
    pub target: usize,
    pub functor: FinFunctor,
    pub certificates: Vec<(Mor, EquivalenceWitness)>,
}

impl Probe {
    pub fn new(
        name: impl Into<String>,
        c: &FinCat,
        sigma: &MorSet,
        t: &TwoCat,
        target: usize,
        functor: FinFunctor,
    ) -> Result<Probe> {
        let u = t.underlying()?;
        validate_functor(c, &u, &functor).map_err(Error::Precondition)?;
        let mut certificates = Vec::new();
        for &s in sigma {
            match is_equivalence_1cell(t, functor.mmap[s]) {
                Some(w) => certificates.push((s, w)),
                None => {
                    return Err(Error::Precondition(format!(
                        "{} is sent to {}, which is not an equivalence",
                        c.mor_name(s),
                        t.cells1[functor.mmap[s]].name
                    )))
                }
            }
        }
        Ok(Probe { name: name.into(), target, functor, certificates })
    }
}

#[derive(Clone, Debug)]
pub struct ProbeSuite {
    pub targets: Vec<TwoCat>,
    pub probes: Vec<Probe>,
}

impl ProbeSuite {
    pub fn target(&self, p: &Probe) -> &TwoCat {
        &self.targets[p.target]
    }

    /// Adds every functor `c -> underlying(t)` that sends `sigma` to equivalences.
    pub fn add_target(&mut self, c: &FinCat, sigma: &MorSet, t: TwoCat, budget: &Budget) -> Result<usize> {
        let u = t.underlying()?;
        let equiv: Vec<bool> = (0..t.n1()).map(|f| is_equivalence_1cell(&t, f).is_some()).collect();
        let funs = enumerate_functors_where(c, &u, budget, &|m, x| !sigma.contains(&m) || equiv[x])?;
        let idx = self.targets.len();
        let before = self.probes.len();
        for (k, f) in funs.into_iter().enumerate() {
            let p = Probe::new(format!("{}/{}", t.name, k), c, sigma, &t, idx, f)?;
            self.probes.push(p);
        }
        self.targets.push(t);
        Ok(self.probes.len() - before)
    }
}

/// Discrete targets, the walking equivalence with indiscrete homs and the
/// 2-category of the groupoids `1`, `J`, `Z2`.
pub fn default_probe_suite(c: &FinCat, sigma: &MorSet, budget: &Budget) -> Result<ProbeSuite> {
    let mut s = ProbeSuite { targets: Vec::new(), probes: Vec::new() };
    for x in [fixtures::terminal(), fixtures::walking_iso(), fixtures::cyclic_group(2)] {
        s.add_target(c, sigma, TwoCat::discrete(&x), budget)?;
    }
    s.add_target(c, sigma, TwoCat::indiscrete(&fixtures::walking_equivalence_1cat()), budget)?;
    let gpd = TwoCat::of_categories(
        "Gpd",
        &[fixtures::terminal(), fixtures::walking_iso(), fixtures::cyclic_group(2)],
        budget,
    )?;
    s.add_target(c, sigma, gpd, budget)?;
    Ok(s)
}

/// The inclusion of the base into a closed `H(C, Sigma)`, when it is a probe.
pub fn inclusion_probe(ho: &HoPresentation) -> Result<(TwoCat, Probe)> {
    let t = ho.two()?.clone();
    if ho.objects.len() != ho.base.num_objects() {
        return Err(Error::Precondition("the presentation does not contain every object".into()));
    }
    let f = FinFunctor {
        omap: ho.base.objects().collect(),
        mmap: ho.base.morphisms().map(|m| ho.cell1_of(m).unwrap()).collect(),
    };
    let p = Probe::new("inclusion", &ho.base, &ho.sigma, &t, 0, f)?;
    Ok((t, p))
}

/// The unique `a: F d0 => F d1` with `F s . a = Id_{F x}`.
pub fn compute_fc_hat(t: &TwoCat, p: &Probe, cyl: &Cylinder) -> Result<usize> {
    let f = &p.functor;
    let (fd0, fd1, fs, fx) = (f.mmap[cyl.d0], f.mmap[cyl.d1], f.mmap[cyl.s], f.mmap[cyl.x]);
    let sols: Vec<usize> = t.hom2(fd0, fd1).into_iter().filter(|&a| t.whisker_r(fs, a) == Some(t.id2[fx])).collect();
    match sols.as_slice() {
        [a] => Ok(*a),
        [] => Err(Error::Math(format!("probe {}: no 2-cell over the cylinder", p.name))),
        _ => Err(Error::Math(format!("probe {}: {} 2-cells over the cylinder", p.name, sols.len()))),
    }
}

/// `Fh . F^C`.
pub fn compute_fh_hat(t: &TwoCat, p: &Probe, h: &Homotopy) -> Result<usize> {
    let a = compute_fc_hat(t, p, &h.cyl)?;
    t.whisker_r(p.functor.mmap[h.h], a).ok_or_else(|| Error::Math("whisker outside the target".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Extension {
    pub functor: TwoFunctor,
    /// Cylinders whose connecting 2-cell was found unique.
    pub cylinders_scanned: usize,
}

/// The 2-functor on the presentation induced by a probe. Every term of a
/// class must evaluate to the same 2-cell; a disagreement is a
/// well-definedness failure.
pub fn extend_functor(ho: &HoPresentation, t: &TwoCat, p: &Probe) -> Result<Extension> {
    let src = ho.two()?;
    let mut fc: HashMap<Cylinder, usize> = HashMap::new();
    for g in &ho.generators {
        if let std::collections::hash_map::Entry::Vacant(v) = fc.entry(g.cyl) {
            v.insert(compute_fc_hat(t, p, &g.cyl)?);
        }
    }
    let mut val = vec![usize::MAX; ho.terms.len()];
    for (n, term) in ho.terms.iter().enumerate() {
        val[n] = match *term {
            Term::Gen(i) => {
                let g = &ho.generators[i];
                t.whisker_r(p.functor.mmap[g.h], fc[&g.cyl])
                    .ok_or_else(|| Error::Math("whisker outside the target".into()))?
            }
            Term::Id(f) => t.id2[p.functor.mmap[f]],
            Term::Comp(b, a) => t.v(val[b], val[a]).ok_or_else(|| {
                Error::Math(format!("well-definedness failure under {}: composite not defined", p.name))
            })?,
        };
    }
    let mut map2 = vec![usize::MAX; src.n2()];
    for (n, &cell) in ho.term_cell.iter().enumerate() {
        if map2[cell] == usize::MAX {
            map2[cell] = val[n];
        } else if map2[cell] != val[n] {
            return Err(Error::Math(format!(
                "well-definedness failure under {}: 2-cell {} has images {} and {}",
                p.name, src.cells2[cell].name, t.cells2[map2[cell]].name, t.cells2[val[n]].name
            )));
        }
    }
    let tf = TwoFunctor {
        omap: ho.objects.iter().map(|&o| p.functor.omap[o]).collect(),
        map1: ho.cells1.iter().map(|&m| p.functor.mmap[m]).collect(),
        map2,
    };
    validate_twofunctor(src, t, &tf)
        .map_err(|e| Error::Math(format!("extension of {} is not a 2-functor: {e}", p.name)))?;
    Ok(Extension { functor: tf, cylinders_scanned: fc.len() })
}

/// Three-valued comparison of two 2-cells of a closed presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CellEquality {
    Equal,
    Distinct { probe: String },
    Undecided,
}

impl fmt::Display for CellEquality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellEquality::Equal => write!(f, "equal"),
            CellEquality::Distinct { probe } => write!(f, "distinct (probe {probe})"),
            CellEquality::Undecided => write!(f, "undecided at bound"),
        }
    }
}

pub fn compare_cells(ho: &HoPresentation, suite: &ProbeSuite, a: usize, b: usize) -> Result<CellEquality> {
    if a == b {
        return Ok(CellEquality::Equal);
    }
    for p in &suite.probes {
        let ext = extend_functor(ho, suite.target(p), p)?;
        if ext.functor.map2[a] != ext.functor.map2[b] {
            return Ok(CellEquality::Distinct { probe: p.name.clone() });
        }
    }
    if let Ok((t, p)) = inclusion_probe(ho) {
        let ext = extend_functor(ho, &t, &p)?;
        if ext.functor.map2[a] != ext.functor.map2[b] {
            return Ok(CellEquality::Distinct { probe: p.name });
        }
    }
    Ok(CellEquality::Undecided)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct NatExtensionReport {
    pub naturality_failures: Vec<String>,
    pub clave_failures: Vec<String>,
    pub cylinders: usize,
}

impl NatExtensionReport {
    pub fn pass(&self) -> bool {
        self.naturality_failures.is_empty() && self.clave_failures.is_empty()
    }
}

/// `theta_W . F^C = G^C . theta_X` on every cylinder.
pub fn clave_check(t: &TwoCat, pf: &Probe, pg: &Probe, theta: &[usize], cyls: &[Cylinder]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for cyl in cyls {
        let a = compute_fc_hat(t, pf, cyl)?;
        let b = compute_fc_hat(t, pg, cyl)?;
        let lhs = t.whisker_r(theta[cyl.w], a);
        let rhs = t.whisker_l(b, theta[cyl.src]);
        if lhs.is_none() || lhs != rhs {
            out.push(format!("cylinder at object {} over W = {}", cyl.src, cyl.w));
        }
    }
    Ok(out)
}

/// Checks that a natural transformation `theta: F => G` between probes
/// (components are 1-cells of the common target) is 2-natural on the
/// presentation, plus the cylinder identity.
pub fn extend_nat_transf(
    ho: &HoPresentation,
    t: &TwoCat,
    pf: &Probe,
    pg: &Probe,
    theta: &[usize],
) -> Result<NatExtensionReport> {
    let u = t.underlying()?;
    validate_nat_transf(&ho.base, &u, &pf.functor, &pg.functor, &NatTransf { components: theta.to_vec() })
        .map_err(Error::Precondition)?;
    let src = ho.two()?;
    let ef = extend_functor(ho, t, pf)?;
    let eg = extend_functor(ho, t, pg)?;
    let mut rep = NatExtensionReport::default();
    for (k, cell) in src.cells2.iter().enumerate() {
        let f = ho.cells1[cell.src];
        let (x, y) = (ho.base.dom(f), ho.base.cod(f));
        let lhs = t.whisker_r(theta[y], ef.functor.map2[k]);
        let rhs = t.whisker_l(eg.functor.map2[k], theta[x]);
        if lhs.is_none() || lhs != rhs {
            rep.naturality_failures.push(cell.name.clone());
        }
    }
    let mut cyls: Vec<Cylinder> = ho.generators.iter().map(|g| g.cyl).collect();
    cyls.sort();
    cyls.dedup();
    rep.cylinders = cyls.len();
    rep.clave_failures = clave_check(t, pf, pg, theta, &cyls)?;
    Ok(rep)
}

/// Every natural transformation between two probes into the same target.
pub fn probe_transformations(
    c: &FinCat,
    t: &TwoCat,
    pf: &Probe,
    pg: &Probe,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>> {
    let u = t.underlying()?;
    nat_transfs(c, &u, &pf.functor, &pg.functor, budget)
}

/// A functorial realization of a weak factorization system: a middle
/// object and factorization per morphism, and a connecting morphism per
/// commutative square `(u, v): f -> g` with `g u = v f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorialFactorization {
    pub mid: Vec<Obj>,
    pub lambda: Vec<Mor>,
    pub rho: Vec<Mor>,
    /// `(f, g, u, v) -> F(u, v)`.
    pub connect: BTreeMap<(Mor, Mor, Mor, Mor), Mor>,
}

/// All squares `(f, g, u, v)` of the arrow category.
pub fn arrow_squares(c: &FinCat) -> Vec<(Mor, Mor, Mor, Mor)> {
    let mut out = Vec::new();
    for f in c.morphisms() {
        for g in c.morphisms() {
            for &u in c.hom(c.dom(f), c.dom(g)) {
                for &v in c.hom(c.cod(f), c.cod(g)) {
                    if c.compose(g, u) == c.compose(v, f) {
                        out.push((f, g, u, v));
                    }
                }
            }
        }
    }
    out
}

pub fn validate_functorial_factorization(
    c: &FinCat,
    l: &MorSet,
    r: &MorSet,
    ff: &FunctorialFactorization,
) -> std::result::Result<(), String> {
    let n = c.num_morphisms();
    if ff.mid.len() != n || ff.lambda.len() != n || ff.rho.len() != n {
        return Err("one factorization per morphism is required".into());
    }
    for f in c.morphisms() {
        let (la, rh) = (ff.lambda[f], ff.rho[f]);
        if c.dom(la) != c.dom(f) || c.cod(la) != ff.mid[f] || c.dom(rh) != ff.mid[f] || c.cod(rh) != c.cod(f) {
            return Err(format!("factorization of {} is ill-typed", c.mor_name(f)));
        }
        if c.compose(rh, la) != f {
            return Err(format!("rho . lambda != {}", c.mor_name(f)));
        }
        if !l.contains(&la) || !r.contains(&rh) {
            return Err(format!("factorization of {} leaves the classes", c.mor_name(f)));
        }
    }
    for &(f, g, u, v) in &arrow_squares(c) {
        let Some(&k) = ff.connect.get(&(f, g, u, v)) else {
            return Err(format!("no F(u, v) for the square {} -> {}", c.mor_name(f), c.mor_name(g)));
        };
        if c.dom(k) != ff.mid[f] || c.cod(k) != ff.mid[g] {
            return Err(format!("F({}, {}) is ill-typed", c.mor_name(u), c.mor_name(v)));
        }
        if c.compose(k, ff.lambda[f]) != c.compose(ff.lambda[g], u)
            || c.compose(ff.rho[g], k) != c.compose(v, ff.rho[f])
        {
            return Err(format!("F({}, {}) breaks a naturality square", c.mor_name(u), c.mor_name(v)));
        }
        if f == g && c.is_identity(u) && c.is_identity(v) && !c.is_identity(k) {
            return Err(format!("F(id, id) on {} is not the identity", c.mor_name(f)));
        }
    }
    for &(f, g, u, v) in &arrow_squares(c) {
        for &(g2, h, u2, v2) in &arrow_squares(c) {
            if g2 != g {
                continue;
            }
            let whole = ff.connect[&(f, h, c.compose(u2, u), c.compose(v2, v))];
            if whole != c.compose(ff.connect[&(g, h, u2, v2)], ff.connect[&(f, g, u, v)]) {
                return Err(format!(
                    "F is not functorial at {} -> {} -> {}",
                    c.mor_name(f),
                    c.mor_name(g),
                    c.mor_name(h)
                ));
            }
        }
    }
    Ok(())
}

fn connect_first(c: &FinCat, mid: &[Obj], lambda: &[Mor], rho: &[Mor]) -> Option<BTreeMap<(Mor, Mor, Mor, Mor), Mor>> {
    let mut out = BTreeMap::new();
    for (f, g, u, v) in arrow_squares(c) {
        let k = if f == g && c.is_identity(u) && c.is_identity(v) {
            c.id(mid[f])
        } else {
            *c.hom(mid[f], mid[g]).iter().find(|&&k| {
                c.compose(k, lambda[f]) == c.compose(lambda[g], u) && c.compose(rho[g], k) == c.compose(v, rho[f])
            })?
        };
        out.insert((f, g, u, v), k);
    }
    Some(out)
}

/// Searches the per-morphism factorization choices in order, taking the
/// first connecting morphism for each square, and returns the first
/// choice that validates.
pub fn search_functorial_factorization(
    c: &FinCat,
    l: &MorSet,
    r: &MorSet,
    budget: &Budget,
) -> Result<Option<FunctorialFactorization>> {
    let choices: Vec<Vec<(Mor, Mor)>> = c
        .morphisms()
        .map(|f| factorizations(c, f).into_iter().filter(|(a, b)| l.contains(a) && r.contains(b)).collect())
        .collect();
    if choices.iter().any(|v| v.is_empty()) {
        return Ok(None);
    }
    let n = choices.len();
    let mut pick = vec![0usize; n];
    loop {
        budget.charge("functorial factorization", 1)?;
        let lambda: Vec<Mor> = (0..n).map(|f| choices[f][pick[f]].0).collect();
        let rho: Vec<Mor> = (0..n).map(|f| choices[f][pick[f]].1).collect();
        let mid: Vec<Obj> = lambda.iter().map(|&x| c.cod(x)).collect();
        if let Some(connect) = connect_first(c, &mid, &lambda, &rho) {
            let ff = FunctorialFactorization { mid, lambda, rho, connect };
            if validate_functorial_factorization(c, l, r, &ff).is_ok() {
                return Ok(Some(ff));
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

/// Cofibrant replacement `Q`, `p: Q => Id`, fibrant replacement `R`,
/// `i: Id => R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplacementData {
    pub q: FinFunctor,
    pub p: NatTransf,
    pub r: FinFunctor,
    pub i: NatTransf,
}

/// `fact_cof` realizes `(coF, F n W)`, `fact_fib` realizes `(coF n W, F)`.
pub fn build_replacements(
    m: &ModelStructure,
    fact_cof: &FunctorialFactorization,
    fact_fib: &FunctorialFactorization,
) -> Result<ReplacementData> {
    let c = &m.base;
    let (tf, tc) = (m.trivial_fibrations(), m.trivial_cofibrations());
    validate_functorial_factorization(c, &m.cof, &tf, fact_cof)
        .map_err(|e| Error::Math(format!("(coF, F n W): {e}")))?;
    validate_functorial_factorization(c, &tc, &m.f, fact_fib).map_err(|e| Error::Math(format!("(coF n W, F): {e}")))?;
    let zero = initial(c).ok_or_else(|| Error::Precondition("no initial object".into()))?;
    let one = terminal(c).ok_or_else(|| Error::Precondition("no terminal object".into()))?;
    let from0: Vec<Mor> = c.objects().map(|x| unique_arrow(c, zero, x).unwrap()).collect();
    let to1: Vec<Mor> = c.objects().map(|x| unique_arrow(c, x, one).unwrap()).collect();
    let q = FinFunctor {
        omap: c.objects().map(|x| fact_cof.mid[from0[x]]).collect(),
        mmap: c.morphisms().map(|f| fact_cof.connect[&(from0[c.dom(f)], from0[c.cod(f)], c.id(zero), f)]).collect(),
    };
    let p = NatTransf { components: c.objects().map(|x| fact_cof.rho[from0[x]]).collect() };
    let r = FinFunctor {
        omap: c.objects().map(|x| fact_fib.mid[to1[x]]).collect(),
        mmap: c.morphisms().map(|f| fact_fib.connect[&(to1[c.dom(f)], to1[c.cod(f)], f, c.id(one))]).collect(),
    };
    let i = NatTransf { components: c.objects().map(|x| fact_fib.lambda[to1[x]]).collect() };
    validate_functor(c, c, &q).map_err(|e| Error::Math(format!("Q: {e}")))?;
    validate_functor(c, c, &r).map_err(|e| Error::Math(format!("R: {e}")))?;
    validate_nat_transf(c, c, &q, &FinFunctor::identity(c), &p).map_err(|e| Error::Math(format!("p: {e}")))?;
    validate_nat_transf(c, c, &FinFunctor::identity(c), &r, &i).map_err(|e| Error::Math(format!("i: {e}")))?;
    let (cof, fib) = (cofibrant_objects(m)?, fibrant_objects(m)?);
    for x in c.objects() {
        if !cof.contains(&q.omap[x]) || !tf.contains(&p.components[x]) {
            return Err(Error::Math(format!("Q at {} is not a cofibrant replacement", c.object_name(x))));
        }
        if !fib.contains(&r.omap[x]) || !tc.contains(&i.components[x]) {
            return Err(Error::Math(format!("R at {} is not a fibrant replacement", c.object_name(x))));
        }
    }
    for &w in &m.w {
        if !m.w.contains(&q.mmap[w]) || !m.w.contains(&r.mmap[w]) {
            return Err(Error::Math(format!("replacement of {} leaves W", c.mor_name(w))));
        }
    }
    Ok(ReplacementData { q, p, r, i })
}

/// Searches functorial realizations for both factorizations and builds the
/// replacements from them.
pub fn default_replacements(m: &ModelStructure, budget: &Budget) -> Result<ReplacementData> {
    let c = &m.base;
    let (tf, tc) = (m.trivial_fibrations(), m.trivial_cofibrations());
    let fc = search_functorial_factorization(c, &m.cof, &tf, budget)?
        .ok_or_else(|| Error::Math("no functorial (coF, F n W) factorization".into()))?;
    let ff = search_functorial_factorization(c, &tc, &m.f, budget)?
        .ok_or_else(|| Error::Math("no functorial (coF n W, F) factorization".into()))?;
    build_replacements(m, &fc, &ff)
}

/// `q = R Q` as a functor into the underlying category of `Ho`, with an
/// equivalence witness for every weak equivalence.
#[derive(Clone, Debug, Serialize)]
pub struct LocalizingFunctor {
    /// Object of `Ho` and 1-cell for every object and morphism of `C`.
    pub functor: FinFunctor,
    pub equivalences: Vec<(Mor, EquivalenceWitness)>,
}

pub fn build_q(m: &ModelStructure, repl: &ReplacementData, ho: &HoPresentation) -> Result<LocalizingFunctor> {
    let c = &m.base;
    let t = ho.two()?;
    let rq = repl.r.after(&repl.q);
    let mut omap = Vec::new();
    for x in c.objects() {
        let o = ho.objects.iter().position(|&y| y == rq.omap[x]).ok_or_else(|| {
            Error::Math(format!("RQ{} = {} is not fibrant-cofibrant", c.object_name(x), c.object_name(rq.omap[x])))
        })?;
        omap.push(o);
    }
    let mmap: Vec<usize> = c.morphisms().map(|f| ho.cell1_of(rq.mmap[f]).unwrap()).collect();
    let functor = FinFunctor { omap, mmap };
    validate_functor(c, &t.underlying()?, &functor).map_err(|e| Error::Math(format!("q: {e}")))?;
    let mut equivalences = Vec::new();
    for &w in &m.w {
        match is_equivalence_1cell(t, functor.mmap[w]) {
            Some(e) => equivalences.push((w, e)),
            None => return Err(Error::Math(format!("q({}) is not an equivalence", c.mor_name(w)))),
        }
    }
    Ok(LocalizingFunctor { functor, equivalences })
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationReport {
    pub target: String,
    /// Functors `C_fc -> X` inverting `W`.
    pub functors: usize,
    pub factored: usize,
    pub failures: Vec<String>,
}

impl LocalizationReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.factored == self.functors
    }
}

/// Every functor from the 1-cells of `ho` to `x` that inverts `w` must
/// factor uniquely through `pi0(Ho)`.
pub fn localization_check(ho: &HoPresentation, w: &MorSet, x: &FinCat, budget: &Budget) -> Result<LocalizationReport> {
    let t = ho.two()?;
    let u = t.underlying()?;
    let p = pi0(t)?;
    let in_w: Vec<bool> = ho.cells1.iter().map(|m| w.contains(m)).collect();
    let isos = x.isos();
    let funs = enumerate_functors_where(&u, x, budget, &|m, y| !in_w[m] || isos.contains(&y))?;
    let mut rep =
        LocalizationReport { target: x.name().to_string(), functors: funs.len(), factored: 0, failures: Vec::new() };
    for (k, f) in funs.into_iter().enumerate() {
        let Some(tf) = TwoFunctor::into_discrete(t, f.omap.clone(), f.mmap.clone()) else {
            rep.failures.push(format!("functor #{k} separates the ends of a 2-cell"));
            continue;
        };
        let r = pi0_universal_check(t, &p, x, &tf, budget)?;
        if r.pass() {
            rep.factored += 1;
        } else {
            rep.failures.push(format!("functor #{k}: {} factorizations {}", r.solutions, r.note.unwrap_or_default()));
        }
    }
    Ok(rep)
}

/// Targets for [`localization_check`]: a fixed list of small categories
/// plus every preorder on at most three elements up to isomorphism.
pub fn localization_targets() -> Vec<FinCat> {
    let mut out = vec![
        fixtures::terminal(),
        fixtures::chain(1),
        fixtures::walking_iso(),
        fixtures::parallel_pair(),
        fixtures::cyclic_group(2),
        fixtures::cyclic_group(3),
        fixtures::walking_equivalence_1cat(),
        fixtures::chain_example(),
        idempotent(),
    ];
    out.extend(small_preorders(3));
    out
}

fn idempotent() -> FinCat {
    let mut b = crate::fincat::CatBuilder::new("Idem");
    let o = b.object("*");
    b.morphism("e", o, o);
    let e = b.morphism_index("e").unwrap();
    b.compose(e, e, e);
    b.build().expect("idempotent monoid")
}

/// Preorders on `1..=n` elements, one per isomorphism class.
pub fn small_preorders(n: usize) -> Vec<FinCat> {
    let mut out = Vec::new();
    for k in 1..=n {
        let pairs: Vec<(usize, usize)> =
            (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
        let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
        for mask in 0u32..(1 << pairs.len()) {
            let mut rel = vec![false; k * k];
            for i in 0..k {
                rel[i * k + i] = true;
            }
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    rel[i * k + j] = true;
                }
            }
            let transitive =
                (0..k).all(|i| (0..k).all(|j| (0..k).all(|l| !(rel[i * k + j] && rel[j * k + l]) || rel[i * k + l])));
            if !transitive {
                continue;
            }
            let canon = permutations(k)
                .into_iter()
                .map(|p| (0..k * k).map(|ij| rel[p[ij / k] * k + p[ij % k]]).collect::<Vec<bool>>())
                .min()
                .unwrap();
            if !seen.insert(canon.clone()) {
                continue;
            }
            let names: Vec<String> = (0..k).map(|i| format!("p{i}")).collect();
            let objs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let le: Vec<(&str, &str)> = (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && canon[i * k + j])
                .map(|(i, j)| (objs[i], objs[j]))
                .collect();
            out.push(fixtures::poset(&format!("Pre{k}.{}", seen.len() - 1), &objs, &le));
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// The equivalence relation on 1-cells generated by "there is a homotopy
/// `f => g`" (q-homotopies only, for a model structure), as class labels.
pub fn homotopy_relation_labels(
    ho: &HoPresentation,
    m: Option<&ModelStructure>,
    budget: &Budget,
) -> Result<Vec<usize>> {
    let c = &ho.base;
    let mut d = Dsu::new(ho.cells1.len());
    for (i, &f) in ho.cells1.iter().enumerate() {
        for (j, &g) in ho.cells1.iter().enumerate() {
            if i >= j || !c.parallel(f, g) {
                continue;
            }
            let hs = enumerate_homotopies(c, &ho.sigma, f, g, budget)?;
            let related = match m {
                None => !hs.is_empty(),
                Some(m) => {
                    let mut any = false;
                    for h in &hs {
                        if is_q_cylinder(m, &h.cyl)?.is_some() {
                            any = true;
                            break;
                        }
                    }
                    any
                }
            };
            if related {
                d.union(i, j);
            }
        }
    }
    Ok(d.labels())
}
