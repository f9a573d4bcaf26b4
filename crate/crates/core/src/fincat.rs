//! Finite categories given by total composition tables, functors, natural
//! transformations and brute-force (co)limits.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::search::Budget;

pub type Obj = usize;
pub type Mor = usize;
pub type MorSet = BTreeSet<Mor>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Morphism {
    pub name: String,
    pub dom: Obj,
    pub cod: Obj,
}

/// A finite category. Morphisms are ordered with the identities first (in
/// object order) followed by the declared morphisms; that order is the
/// "lexicographic" order used for every witness and tie-break.
#[derive(Clone, Debug)]
pub struct FinCat {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<Mor>,
    comp: Vec<Option<Mor>>,
    hom: Vec<Vec<Mor>>,
}

impl PartialEq for FinCat {
    /// Structural equality; the category name is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.comp == other.comp
    }
}

impl Eq for FinCat {}

/// Incremental construction of a [`FinCat`]. Identities are created
/// implicitly as `id_<obj>` and their composites are filled in.
#[derive(Clone, Debug, Default)]
pub struct CatBuilder {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<(String, Obj, Obj)>,
    compose: Vec<(Mor, Mor, Mor)>,
}

impl CatBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CatBuilder { name: name.into(), ..Default::default() }
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn object(&mut self, name: impl Into<String>) -> Obj {
        self.objects.push(name.into());
        self.objects.len() - 1
    }

    /// Index is relative to the declared (non-identity) morphisms.
    pub fn morphism(&mut self, name: impl Into<String>, dom: Obj, cod: Obj) -> usize {
        self.morphisms.push((name.into(), dom, cod));
        self.morphisms.len() - 1
    }

    pub fn object_index(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name)
    }

    /// Final morphism index of a declared or identity morphism name.
    pub fn morphism_index(&self, name: &str) -> Option<Mor> {
        let n = self.objects.len();
        if let Some(o) = self.objects.iter().position(|o| format!("id_{o}") == name) {
            return Some(o);
        }
        self.morphisms.iter().position(|m| m.0 == name).map(|i| i + n)
    }

    /// Records `g . f = h` using final morphism indices.
    pub fn compose(&mut self, g: Mor, f: Mor, h: Mor) {
        self.compose.push((g, f, h));
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    /// Builds the table. Conflicting entries and bad references are input
    /// errors; missing composites are left for [`validate_category`].
    pub fn build(self) -> Result<FinCat> {
        let n = self.objects.len();
        let mut morphisms: Vec<Morphism> =
            (0..n).map(|o| Morphism { name: format!("id_{}", self.objects[o]), dom: o, cod: o }).collect();
        for (name, dom, cod) in &self.morphisms {
            if *dom >= n || *cod >= n {
                return Err(Error::Input(format!("morphism {name} refers to an unknown object")));
            }
            morphisms.push(Morphism { name: name.clone(), dom: *dom, cod: *cod });
        }
        let mut seen = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            if seen.insert(m.name.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate morphism id {}", m.name)));
            }
        }
        let mut seen_obj = BTreeSet::new();
        for o in &self.objects {
            if !seen_obj.insert(o.clone()) {
                return Err(Error::Input(format!("duplicate object id {o}")));
            }
        }
        let m = morphisms.len();
        let mut comp = vec![None; m * m];
        for f in 0..m {
            let (d, c) = (morphisms[f].dom, morphisms[f].cod);
            comp[c * m + f] = Some(f);
            comp[f * m + d] = Some(f);
        }
        for &(g, f, h) in &self.compose {
            if g >= m || f >= m || h >= m {
                return Err(Error::Input("compose refers to an unknown morphism".into()));
            }
            match comp[g * m + f] {
                Some(prev) if prev != h => {
                    return Err(Error::Input(format!(
                        "conflicting composite {} . {}: {} vs {}",
                        morphisms[g].name, morphisms[f].name, morphisms[prev].name, morphisms[h].name
                    )))
                }
                _ => comp[g * m + f] = Some(h),
            }
        }
        let identities = (0..n).collect();
        let mut cat = FinCat { name: self.name, objects: self.objects, morphisms, identities, comp, hom: vec![] };
        cat.rebuild_hom();
        Ok(cat)
    }
}

impl FinCat {
    fn rebuild_hom(&mut self) {
        let n = self.objects.len();
        let mut hom = vec![Vec::new(); n * n];
        for (i, m) in self.morphisms.iter().enumerate() {
            hom[m.dom * n + m.cod].push(i);
        }
        self.hom = hom;
    }

    /// Builds a category from raw parts (identities at the given indices).
    pub fn from_parts(
        name: impl Into<String>,
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<Mor>,
        comp: Vec<Option<Mor>>,
    ) -> Result<FinCat> {
        let m = morphisms.len();
        if comp.len() != m * m || identities.len() != objects.len() {
            return Err(Error::Input("inconsistent table sizes".into()));
        }
        if morphisms.iter().any(|x| x.dom >= objects.len() || x.cod >= objects.len())
            || identities.iter().any(|&i| i >= m)
            || comp.iter().flatten().any(|&h| h >= m)
        {
            return Err(Error::Input("reference out of range".into()));
        }
        let mut c = FinCat { name: name.into(), objects, morphisms, identities, comp, hom: vec![] };
        c.rebuild_hom();
        Ok(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> std::ops::Range<Obj> {
        0..self.objects.len()
    }

    pub fn morphisms(&self) -> std::ops::Range<Mor> {
        0..self.morphisms.len()
    }

    pub fn object_name(&self, o: Obj) -> &str {
        &self.objects[o]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism(&self, f: Mor) -> &Morphism {
        &self.morphisms[f]
    }

    pub fn mor_name(&self, f: Mor) -> &str {
        &self.morphisms[f].name
    }

    pub fn dom(&self, f: Mor) -> Obj {
        self.morphisms[f].dom
    }

    pub fn cod(&self, f: Mor) -> Obj {
        self.morphisms[f].cod
    }

    pub fn id(&self, o: Obj) -> Mor {
        self.identities[o]
    }

    pub fn is_identity(&self, f: Mor) -> bool {
        self.identities[self.dom(f)] == f
    }

    pub fn find_object(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn find_morphism(&self, name: &str) -> Option<Mor> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    /// Looks up a morphism name, reporting an input error when absent.
    pub fn morphism_by_name(&self, name: &str) -> Result<Mor> {
        self.find_morphism(name).ok_or_else(|| Error::Input(format!("unknown morphism {name}")))
    }

    pub fn object_by_name(&self, name: &str) -> Result<Obj> {
        self.find_object(name).ok_or_else(|| Error::Input(format!("unknown object {name}")))
    }

    pub fn hom(&self, a: Obj, b: Obj) -> &[Mor] {
        &self.hom[a * self.objects.len() + b]
    }

    pub fn parallel(&self, f: Mor, g: Mor) -> bool {
        self.dom(f) == self.dom(g) && self.cod(f) == self.cod(g)
    }

    /// `g . f` when the pair is composable and the table has an entry.
    pub fn try_compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        if self.dom(g) != self.cod(f) {
            return None;
        }
        self.comp[g * self.morphisms.len() + f]
    }

    /// `g . f`; panics on a non-composable pair or a missing table entry.
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        self.try_compose(g, f)
            .unwrap_or_else(|| panic!("no composite {} . {} in {}", self.mor_name(g), self.mor_name(f), self.name))
    }

    /// Composite of a path written right to left: `compose_path(&[h, g, f]) = h g f`.
    pub fn compose_path(&self, path: &[Mor]) -> Mor {
        let mut it = path.iter().rev();
        let mut acc = *it.next().expect("empty path");
        for &g in it {
            acc = self.compose(g, acc);
        }
        acc
    }

    pub fn all_objects(&self) -> BTreeSet<Obj> {
        self.objects().collect()
    }

    pub fn all_morphisms(&self) -> MorSet {
        self.morphisms().collect()
    }

    pub fn identity_set(&self) -> MorSet {
        self.identities.iter().copied().collect()
    }

    pub fn isos(&self) -> MorSet {
        self.morphisms().filter(|&f| self.is_iso(f).is_some()).collect()
    }

    /// Inverse witness when `f` is an isomorphism.
    pub fn is_iso(&self, f: Mor) -> Option<Mor> {
        let (a, b) = (self.dom(f), self.cod(f));
        self.hom(b, a)
            .iter()
            .copied()
            .find(|&g| self.try_compose(g, f) == Some(self.id(a)) && self.try_compose(f, g) == Some(self.id(b)))
    }

    pub fn names(&self, set: &MorSet) -> Vec<String> {
        set.iter().map(|&f| self.mor_name(f).to_string()).collect()
    }

    /// Formal dual: same identifiers, domains and codomains swapped.
    pub fn opposite(&self) -> FinCat {
        let m = self.morphisms.len();
        let morphisms =
            self.morphisms.iter().map(|x| Morphism { name: x.name.clone(), dom: x.cod, cod: x.dom }).collect();
        let mut comp = vec![None; m * m];
        for g in 0..m {
            for f in 0..m {
                // In the dual, g ∘op f = f ∘ g.
                comp[g * m + f] = self.comp[f * m + g];
            }
        }
        let name = match self.name.strip_suffix("^op") {
            Some(base) => base.to_string(),
            None => format!("{}^op", self.name),
        };
        let mut c = FinCat {
            name,
            objects: self.objects.clone(),
            morphisms,
            identities: self.identities.clone(),
            comp,
            hom: vec![],
        };
        c.rebuild_hom();
        c
    }

    /// Full subcategory on `objs` (kept in their original order) and the
    /// inclusion functor.
    pub fn full_subcategory(&self, objs: &BTreeSet<Obj>) -> (FinCat, FinFunctor) {
        let omap: Vec<Obj> = objs.iter().copied().collect();
        let mut oindex = vec![usize::MAX; self.num_objects()];
        for (i, &o) in omap.iter().enumerate() {
            oindex[o] = i;
        }
        // Identities first, then the remaining morphisms in original order.
        let mut mmap: Vec<Mor> = omap.iter().map(|&o| self.id(o)).collect();
        for f in self.morphisms() {
            if !self.is_identity(f) && objs.contains(&self.dom(f)) && objs.contains(&self.cod(f)) {
                mmap.push(f);
            }
        }
        let mut mindex = HashMap::new();
        for (i, &f) in mmap.iter().enumerate() {
            mindex.insert(f, i);
        }
        let morphisms = mmap
            .iter()
            .map(|&f| Morphism {
                name: self.mor_name(f).to_string(),
                dom: oindex[self.dom(f)],
                cod: oindex[self.cod(f)],
            })
            .collect();
        let k = mmap.len();
        let mut comp = vec![None; k * k];
        for (gi, &g) in mmap.iter().enumerate() {
            for (fi, &f) in mmap.iter().enumerate() {
                if let Some(h) = self.try_compose(g, f) {
                    comp[gi * k + fi] = mindex.get(&h).copied();
                }
            }
        }
        let sub = FinCat::from_parts(
            format!("{}_sub", self.name),
            omap.iter().map(|&o| self.objects[o].clone()).collect(),
            morphisms,
            (0..omap.len()).collect(),
            comp,
        )
        .expect("full subcategory tables are consistent");
        (sub, FinFunctor { omap, mmap })
    }
}

/// One violated category invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CatViolation {
    MissingComposite { g: String, f: String },
    TypeMismatch { g: String, f: String, h: String },
    Associativity { h: String, g: String, f: String },
    Unit { f: String },
}

impl fmt::Display for CatViolation {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatViolation::MissingComposite { g, f } => write!(fm, "missing composite {g} . {f}"),
            CatViolation::TypeMismatch { g, f, h } => write!(fm, "composite {g} . {f} = {h} has wrong domain/codomain"),
            CatViolation::Associativity { h, g, f } => write!(fm, "associativity fails for {h} . {g} . {f}"),
            CatViolation::Unit { f } => write!(fm, "unit law fails for {f}"),
        }
    }
}

/// Lists every violated invariant; empty means the table is a category.
pub fn validate_category(c: &FinCat) -> Vec<CatViolation> {
    let mut out = Vec::new();
    let nm = |f: Mor| c.mor_name(f).to_string();
    let mut typed = true;
    for g in c.morphisms() {
        for f in c.morphisms() {
            if c.dom(g) != c.cod(f) {
                continue;
            }
            match c.try_compose(g, f) {
                None => {
                    typed = false;
                    out.push(CatViolation::MissingComposite { g: nm(g), f: nm(f) })
                }
                Some(h) => {
                    if c.dom(h) != c.dom(f) || c.cod(h) != c.cod(g) {
                        typed = false;
                        out.push(CatViolation::TypeMismatch { g: nm(g), f: nm(f), h: nm(h) });
                    }
                }
            }
        }
    }
    for f in c.morphisms() {
        if c.try_compose(f, c.id(c.dom(f))) != Some(f) || c.try_compose(c.id(c.cod(f)), f) != Some(f) {
            out.push(CatViolation::Unit { f: nm(f) });
        }
    }
    if typed {
        for f in c.morphisms() {
            for b in c.objects() {
                for &g in c.hom(c.cod(f), b) {
                    for d in c.objects() {
                        for &h in c.hom(b, d) {
                            let l = c.compose(h, c.compose(g, f));
                            let r = c.compose(c.compose(h, g), f);
                            if l != r {
                                out.push(CatViolation::Associativity { h: nm(h), g: nm(g), f: nm(f) });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Object and morphism maps of a functor; source and target categories are
/// passed alongside.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FinFunctor {
    pub omap: Vec<Obj>,
    pub mmap: Vec<Mor>,
}

impl FinFunctor {
    pub fn identity(c: &FinCat) -> Self {
        FinFunctor { omap: c.objects().collect(), mmap: c.morphisms().collect() }
    }

    /// `self` after `first`.
    pub fn after(&self, first: &FinFunctor) -> FinFunctor {
        FinFunctor {
            omap: first.omap.iter().map(|&o| self.omap[o]).collect(),
            mmap: first.mmap.iter().map(|&f| self.mmap[f]).collect(),
        }
    }

    /// The functor `C^op -> D^op` with the same maps.
    pub fn opposite(&self) -> FinFunctor {
        self.clone()
    }
}

/// Checks dom/cod, identities and composition exhaustively; returns the
/// first failure as text.
pub fn validate_functor(src: &FinCat, tgt: &FinCat, f: &FinFunctor) -> std::result::Result<(), String> {
    if f.omap.len() != src.num_objects() || f.mmap.len() != src.num_morphisms() {
        return Err("map sizes do not match the source".into());
    }
    if f.omap.iter().any(|&o| o >= tgt.num_objects()) || f.mmap.iter().any(|&m| m >= tgt.num_morphisms()) {
        return Err("map refers outside the target".into());
    }
    for m in src.morphisms() {
        let fm = f.mmap[m];
        if tgt.dom(fm) != f.omap[src.dom(m)] || tgt.cod(fm) != f.omap[src.cod(m)] {
            return Err(format!("{} is sent to {} with the wrong endpoints", src.mor_name(m), tgt.mor_name(fm)));
        }
    }
    for o in src.objects() {
        if f.mmap[src.id(o)] != tgt.id(f.omap[o]) {
            return Err(format!("identity of {} not preserved", src.object_name(o)));
        }
    }
    for g in src.morphisms() {
        for b in src.objects() {
            for &h in src.hom(src.cod(g), b) {
                let l = f.mmap[src.compose(h, g)];
                if tgt.try_compose(f.mmap[h], f.mmap[g]) != Some(l) {
                    return Err(format!("composite {} . {} not preserved", src.mor_name(h), src.mor_name(g)));
                }
            }
        }
    }
    Ok(())
}

/// Enumerates all functors `src -> tgt` by backtracking over the object map
/// and then the morphism images, generators first.
pub fn enumerate_functors(src: &FinCat, tgt: &FinCat, budget: &Budget) -> Result<Vec<FinFunctor>> {
    enumerate_functors_filtered(src, tgt, budget, |_| true)
}

/// Like [`enumerate_functors`], with a per-morphism admissibility filter
/// `allowed(src_mor, tgt_mor)` applied during the search.
pub fn enumerate_functors_where(
    src: &FinCat,
    tgt: &FinCat,
    budget: &Budget,
    allowed: &dyn Fn(Mor, Mor) -> bool,
) -> Result<Vec<FinFunctor>> {
    let mut out = Vec::new();
    let n = src.num_objects();
    let mut omap = vec![0; n];
    enum_objects(src, tgt, budget, allowed, 0, &mut omap, &mut out)?;
    Ok(out)
}

fn enumerate_functors_filtered(
    src: &FinCat,
    tgt: &FinCat,
    budget: &Budget,
    keep: impl Fn(&FinFunctor) -> bool,
) -> Result<Vec<FinFunctor>> {
    Ok(enumerate_functors_where(src, tgt, budget, &|_, _| true)?.into_iter().filter(|f| keep(f)).collect())
}

fn enum_objects(
    src: &FinCat,
    tgt: &FinCat,
    budget: &Budget,
    allowed: &dyn Fn(Mor, Mor) -> bool,
    i: usize,
    omap: &mut Vec<Obj>,
    out: &mut Vec<FinFunctor>,
) -> Result<()> {
    if i == src.num_objects() {
        let order: Vec<Mor> = src.morphisms().filter(|&m| !src.is_identity(m)).collect();
        let mut mmap: Vec<Option<Mor>> = vec![None; src.num_morphisms()];
        for o in src.objects() {
            mmap[src.id(o)] = Some(tgt.id(omap[o]));
            if !allowed(src.id(o), tgt.id(omap[o])) {
                return Ok(());
            }
        }
        return enum_morphisms(src, tgt, budget, allowed, omap, &order, 0, &mut mmap, out);
    }
    for t in tgt.objects() {
        budget.charge("functor enumeration", 1)?;
        omap[i] = t;
        enum_objects(src, tgt, budget, allowed, i + 1, omap, out)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn enum_morphisms(
    src: &FinCat,
    tgt: &FinCat,
    budget: &Budget,
    allowed: &dyn Fn(Mor, Mor) -> bool,
    omap: &[Obj],
    order: &[Mor],
    k: usize,
    mmap: &mut Vec<Option<Mor>>,
    out: &mut Vec<FinFunctor>,
) -> Result<()> {
    if k == order.len() {
        let f = FinFunctor { omap: omap.to_vec(), mmap: mmap.iter().map(|x| x.unwrap()).collect() };
        out.push(f);
        return Ok(());
    }
    let m = order[k];
    if mmap[m].is_some() {
        return enum_morphisms(src, tgt, budget, allowed, omap, order, k + 1, mmap, out);
    }
    let cands: Vec<Mor> = tgt.hom(omap[src.dom(m)], omap[src.cod(m)]).to_vec();
    for t in cands {
        budget.charge("functor enumeration", 1)?;
        if !allowed(m, t) {
            continue;
        }
        mmap[m] = Some(t);
        // Check every composite whose three entries are now known, and
        // propagate forced images.
        let mut forced = Vec::new();
        if consistent(src, tgt, mmap, &mut forced) {
            enum_morphisms(src, tgt, budget, allowed, omap, order, k + 1, mmap, out)?;
        }
        for x in forced {
            mmap[x] = None;
        }
        mmap[m] = None;
    }
    Ok(())
}

fn consistent(src: &FinCat, tgt: &FinCat, mmap: &mut [Option<Mor>], forced: &mut Vec<Mor>) -> bool {
    loop {
        let mut changed = false;
        for g in src.morphisms() {
            let Some(fg) = mmap[g] else { continue };
            for f in src.morphisms() {
                if src.dom(g) != src.cod(f) {
                    continue;
                }
                let Some(ff) = mmap[f] else { continue };
                let h = src.compose(g, f);
                let img = match tgt.try_compose(fg, ff) {
                    Some(x) => x,
                    None => return false,
                };
                match mmap[h] {
                    Some(x) if x != img => return false,
                    Some(_) => {}
                    None => {
                        mmap[h] = Some(img);
                        forced.push(h);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Components of a natural transformation between two functors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NatTransf {
    pub components: Vec<Mor>,
}

/// Checks typing and every naturality square.
pub fn validate_nat_transf(
    src: &FinCat,
    tgt: &FinCat,
    f: &FinFunctor,
    g: &FinFunctor,
    t: &NatTransf,
) -> std::result::Result<(), String> {
    if t.components.len() != src.num_objects() {
        return Err("wrong number of components".into());
    }
    for o in src.objects() {
        let c = t.components[o];
        if tgt.dom(c) != f.omap[o] || tgt.cod(c) != g.omap[o] {
            return Err(format!("component at {} has the wrong type", src.object_name(o)));
        }
    }
    for m in src.morphisms() {
        let (a, b) = (src.dom(m), src.cod(m));
        let l = tgt.compose(g.mmap[m], t.components[a]);
        let r = tgt.compose(t.components[b], f.mmap[m]);
        if l != r {
            return Err(format!("naturality square at {} does not commute", src.mor_name(m)));
        }
    }
    Ok(())
}

/// A diagram: a shape category and a functor into an ambient category.
#[derive(Clone, Debug)]
pub struct Diagram {
    pub shape: FinCat,
    pub functor: FinFunctor,
}

impl Diagram {
    pub fn new(shape: FinCat, functor: FinFunctor) -> Self {
        Diagram { shape, functor }
    }
}

/// A cone (legs apex -> D(j)) or cocone (legs D(j) -> apex).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cone {
    pub apex: Obj,
    pub legs: Vec<Mor>,
}

fn cones(c: &FinCat, d: &Diagram, apex: Obj, co: bool) -> Vec<Cone> {
    let js: Vec<Obj> = d.shape.objects().collect();
    let choices: Vec<&[Mor]> =
        js.iter().map(|&j| if co { c.hom(d.functor.omap[j], apex) } else { c.hom(apex, d.functor.omap[j]) }).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(js.len());
    cone_rec(c, d, co, &choices, &mut cur, apex, &mut out);
    out
}

fn cone_rec(c: &FinCat, d: &Diagram, co: bool, choices: &[&[Mor]], cur: &mut Vec<Mor>, apex: Obj, out: &mut Vec<Cone>) {
    let k = cur.len();
    if k == choices.len() {
        out.push(Cone { apex, legs: cur.clone() });
        return;
    }
    for &leg in choices[k] {
        cur.push(leg);
        // Check the shape arrows between already chosen indices.
        let ok = d.shape.morphisms().all(|u| {
            let (a, b) = (d.shape.dom(u), d.shape.cod(u));
            if a >= cur.len() || b >= cur.len() {
                return true;
            }
            let du = d.functor.mmap[u];
            if co {
                c.compose(cur[b], du) == cur[a]
            } else {
                c.compose(du, cur[a]) == cur[b]
            }
        });
        if ok {
            cone_rec(c, d, co, choices, cur, apex, out);
        }
        cur.pop();
    }
}

fn factor_count(c: &FinCat, lim: &Cone, other: &Cone, co: bool) -> usize {
    let cands = if co { c.hom(lim.apex, other.apex) } else { c.hom(other.apex, lim.apex) };
    cands
        .iter()
        .filter(|&&m| {
            lim.legs
                .iter()
                .zip(&other.legs)
                .all(|(&l, &o)| if co { c.compose(m, l) == o } else { c.compose(l, m) == o })
        })
        .count()
}

fn universal(c: &FinCat, d: &Diagram, co: bool) -> Option<Cone> {
    let all: Vec<Vec<Cone>> = c.objects().map(|a| cones(c, d, a, co)).collect();
    for per_apex in &all {
        for cand in per_apex {
            if all.iter().flatten().all(|k| factor_count(c, cand, k, co) == 1) {
                return Some(cand.clone());
            }
        }
    }
    None
}

/// Limiting cone, lowest apex index first and legs lexicographic.
pub fn limit(c: &FinCat, d: &Diagram) -> Option<Cone> {
    universal(c, d, false)
}

/// Colimiting cocone with the same tie-breaking as [`limit`].
pub fn colimit(c: &FinCat, d: &Diagram) -> Option<Cone> {
    universal(c, d, true)
}

/// Small shape categories used for diagrams.
pub mod shapes {
    use super::*;

    pub fn discrete(n: usize) -> FinCat {
        let mut b = CatBuilder::new(format!("discrete{n}"));
        for i in 0..n {
            b.object(format!("j{i}"));
        }
        b.build().unwrap()
    }

    pub fn empty() -> FinCat {
        discrete(0)
    }

    /// `j0 -> j1`.
    pub fn arrow() -> FinCat {
        let mut b = CatBuilder::new("arrow");
        let a = b.object("j0");
        let c = b.object("j1");
        b.morphism("u", a, c);
        b.build().unwrap()
    }

    /// `j0 => j1` with arrows u, v.
    pub fn parallel_pair() -> FinCat {
        let mut b = CatBuilder::new("parallel");
        let a = b.object("j0");
        let c = b.object("j1");
        b.morphism("u", a, c);
        b.morphism("v", a, c);
        b.build().unwrap()
    }

    /// `j1 <- j0 -> j2` with u: j0 -> j1, v: j0 -> j2.
    pub fn span() -> FinCat {
        let mut b = CatBuilder::new("span");
        let a = b.object("j0");
        let x = b.object("j1");
        let y = b.object("j2");
        b.morphism("u", a, x);
        b.morphism("v", a, y);
        b.build().unwrap()
    }

    /// `j0 -> j2 <- j1` with u: j0 -> j2, v: j1 -> j2.
    pub fn cospan() -> FinCat {
        let mut b = CatBuilder::new("cospan");
        let x = b.object("j0");
        let y = b.object("j1");
        let t = b.object("j2");
        b.morphism("u", x, t);
        b.morphism("v", y, t);
        b.build().unwrap()
    }
}

/// Commutative square produced by [`pushout`] or [`pullback`]: for a
/// pushout of `f: A -> B`, `g: A -> C` the legs are `p1: B -> P`,
/// `p2: C -> P`; for a pullback of `f: A -> C`, `g: B -> C` they are
/// `p1: P -> A`, `p2: P -> B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Square {
    pub apex: Obj,
    pub p1: Mor,
    pub p2: Mor,
}

pub fn span_diagram(c: &FinCat, f: Mor, g: Mor) -> Diagram {
    let shape = shapes::span();
    let functor = FinFunctor {
        omap: vec![c.dom(f), c.cod(f), c.cod(g)],
        mmap: vec![c.id(c.dom(f)), c.id(c.cod(f)), c.id(c.cod(g)), f, g],
    };
    Diagram::new(shape, functor)
}

pub fn cospan_diagram(c: &FinCat, f: Mor, g: Mor) -> Diagram {
    let shape = shapes::cospan();
    let functor = FinFunctor {
        omap: vec![c.dom(f), c.dom(g), c.cod(f)],
        mmap: vec![c.id(c.dom(f)), c.id(c.dom(g)), c.id(c.cod(f)), f, g],
    };
    Diagram::new(shape, functor)
}

pub fn discrete_diagram(c: &FinCat, objs: &[Obj]) -> Diagram {
    let shape = shapes::discrete(objs.len());
    let functor = FinFunctor { omap: objs.to_vec(), mmap: objs.iter().map(|&o| c.id(o)).collect() };
    Diagram::new(shape, functor)
}

pub fn parallel_diagram(c: &FinCat, f: Mor, g: Mor) -> Diagram {
    let shape = shapes::parallel_pair();
    let functor = FinFunctor { omap: vec![c.dom(f), c.cod(f)], mmap: vec![c.id(c.dom(f)), c.id(c.cod(f)), f, g] };
    Diagram::new(shape, functor)
}

/// Pushout of a span `f: A -> B`, `g: A -> C`.
pub fn pushout(c: &FinCat, f: Mor, g: Mor) -> Result<Option<Square>> {
    if c.dom(f) != c.dom(g) {
        return Err(Error::Precondition(format!("{} and {} do not share a domain", c.mor_name(f), c.mor_name(g))));
    }
    Ok(colimit(c, &span_diagram(c, f, g)).map(|k| Square { apex: k.apex, p1: k.legs[1], p2: k.legs[2] }))
}

/// Pullback of a cospan `f: A -> C`, `g: B -> C`.
pub fn pullback(c: &FinCat, f: Mor, g: Mor) -> Result<Option<Square>> {
    if c.cod(f) != c.cod(g) {
        return Err(Error::Precondition(format!("{} and {} do not share a codomain", c.mor_name(f), c.mor_name(g))));
    }
    Ok(limit(c, &cospan_diagram(c, f, g)).map(|k| Square { apex: k.apex, p1: k.legs[0], p2: k.legs[1] }))
}

/// Binary coproduct with injections.
pub fn coproduct(c: &FinCat, a: Obj, b: Obj) -> Option<Cone> {
    colimit(c, &discrete_diagram(c, &[a, b]))
}

/// Binary product with projections.
pub fn product(c: &FinCat, a: Obj, b: Obj) -> Option<Cone> {
    limit(c, &discrete_diagram(c, &[a, b]))
}

pub fn terminal(c: &FinCat) -> Option<Obj> {
    limit(c, &discrete_diagram(c, &[])).map(|k| k.apex)
}

pub fn initial(c: &FinCat) -> Option<Obj> {
    colimit(c, &discrete_diagram(c, &[])).map(|k| k.apex)
}

/// Unique morphism `a -> b` when the hom-set is a singleton.
pub fn unique_arrow(c: &FinCat, a: Obj, b: Obj) -> Option<Mor> {
    match c.hom(a, b) {
        [m] => Some(*m),
        _ => None,
    }
}

/// Map out of a coproduct induced by a pair of arrows.
pub fn copair(c: &FinCat, cop: &Cone, f: Mor, g: Mor) -> Option<Mor> {
    c.hom(cop.apex, c.cod(f))
        .iter()
        .copied()
        .find(|&m| c.try_compose(m, cop.legs[0]) == Some(f) && c.try_compose(m, cop.legs[1]) == Some(g))
}

/// Map into a product induced by a pair of arrows.
pub fn pair_into(c: &FinCat, prod: &Cone, f: Mor, g: Mor) -> Option<Mor> {
    c.hom(c.dom(f), prod.apex)
        .iter()
        .copied()
        .find(|&m| c.try_compose(prod.legs[0], m) == Some(f) && c.try_compose(prod.legs[1], m) == Some(g))
}

/// Verdict of [`check_equivalence`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub full: bool,
    pub faithful: bool,
    pub essentially_surjective: bool,
    pub witness: Option<String>,
}

impl EquivalenceReport {
    pub fn is_equivalence(&self) -> bool {
        self.full && self.faithful && self.essentially_surjective
    }
}

pub fn check_equivalence(src: &FinCat, tgt: &FinCat, f: &FinFunctor) -> EquivalenceReport {
    let mut rep = EquivalenceReport { full: true, faithful: true, essentially_surjective: true, witness: None };
    for a in src.objects() {
        for b in src.objects() {
            let images: Vec<Mor> = src.hom(a, b).iter().map(|&m| f.mmap[m]).collect();
            let distinct: BTreeSet<Mor> = images.iter().copied().collect();
            if distinct.len() != images.len() && rep.faithful {
                rep.faithful = false;
                rep.witness.get_or_insert(format!(
                    "not faithful on hom({}, {})",
                    src.object_name(a),
                    src.object_name(b)
                ));
            }
            let target = tgt.hom(f.omap[a], f.omap[b]);
            if distinct.len() != target.len() && rep.full {
                rep.full = false;
                rep.witness.get_or_insert(format!("not full on hom({}, {})", src.object_name(a), src.object_name(b)));
            }
        }
    }
    for t in tgt.objects() {
        let hit = src.objects().any(|a| {
            let fa = f.omap[a];
            fa == t || tgt.hom(fa, t).iter().any(|&m| tgt.is_iso(m).is_some())
        });
        if !hit {
            rep.essentially_surjective = false;
            rep.witness.get_or_insert(format!("{} is not in the essential image", tgt.object_name(t)));
            break;
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn wh_is_valid_with_13_morphisms() {
        let wh = fixtures::walking_homotopy();
        assert_eq!(wh.num_morphisms(), 13);
        assert!(validate_category(&wh).is_empty());
    }

    #[test]
    fn repointed_composite_is_type_error() {
        let wh = fixtures::walking_homotopy();
        let (s, d0) = (wh.find_morphism("s").unwrap(), wh.find_morphism("d0").unwrap());
        let m = wh.num_morphisms();
        let mut comp = wh.comp.clone();
        comp[s * m + d0] = Some(d0);
        let bad =
            FinCat::from_parts("bad", wh.objects.clone(), wh.morphisms.clone(), wh.identities.clone(), comp).unwrap();
        let v = validate_category(&bad);
        assert!(v.iter().any(|x| matches!(x, CatViolation::TypeMismatch { g, f, .. } if g == "s" && f == "d0")));
    }

    #[test]
    fn terminal_category_is_valid() {
        assert!(validate_category(&fixtures::terminal()).is_empty());
    }

    #[test]
    fn lattice_top_is_terminal() {
        let l = fixtures::lattice_2x2();
        assert_eq!(terminal(&l).map(|o| l.object_name(o).to_string()), Some("top".into()));
        assert_eq!(initial(&l).map(|o| l.object_name(o).to_string()), Some("bot".into()));
    }

    #[test]
    fn coproduct_absent_in_parallel_pair() {
        let p = fixtures::parallel_pair();
        let a = p.find_object("A").unwrap();
        assert!(coproduct(&p, a, a).is_none());
    }

    #[test]
    fn pushout_of_identities() {
        let wh = fixtures::walking_homotopy();
        let x = wh.find_object("X").unwrap();
        let sq = pushout(&wh, wh.id(x), wh.id(x)).unwrap().unwrap();
        assert_eq!(sq, Square { apex: x, p1: wh.id(x), p2: wh.id(x) });
    }

    #[test]
    fn pullback_in_poset_is_meet() {
        let l = fixtures::lattice_2x2();
        let (a, b, t) = (l.find_object("a").unwrap(), l.find_object("b").unwrap(), l.find_object("top").unwrap());
        let at = unique_arrow(&l, a, t).unwrap();
        let bt = unique_arrow(&l, b, t).unwrap();
        let sq = pullback(&l, at, bt).unwrap().unwrap();
        assert_eq!(l.object_name(sq.apex), "bot");
    }

    #[test]
    fn iso_examples() {
        let wh = fixtures::walking_homotopy();
        let x = wh.find_object("X").unwrap();
        assert_eq!(wh.is_iso(wh.id(x)), Some(wh.id(x)));
        assert_eq!(wh.is_iso(wh.find_morphism("s").unwrap()), None);
        let j = fixtures::walking_iso();
        assert_eq!(j.is_iso(j.find_morphism("u").unwrap()), j.find_morphism("v"));
    }

    #[test]
    fn equivalence_examples() {
        let wh = fixtures::walking_homotopy();
        assert!(check_equivalence(&wh, &wh, &FinFunctor::identity(&wh)).is_equivalence());
        let j = fixtures::walking_iso();
        let t = fixtures::terminal();
        let a = j.find_object("A").unwrap();
        let (sub, inc) = j.full_subcategory(&[a].into_iter().collect());
        assert!(check_equivalence(&sub, &j, &inc).is_equivalence());
        let to_t = FinFunctor { omap: vec![0; wh.num_objects()], mmap: vec![0; wh.num_morphisms()] };
        assert!(validate_functor(&wh, &t, &to_t).is_ok());
        let r = check_equivalence(&wh, &t, &to_t);
        assert!(!r.faithful);
    }

    #[test]
    fn opposite_is_involution() {
        let wh = fixtures::walking_homotopy();
        assert_eq!(wh.opposite().opposite(), wh);
        assert!(validate_category(&wh.opposite()).is_empty());
        let i = fixtures::chain(1);
        let op = i.opposite();
        let f = op.find_morphism("0_1").unwrap();
        assert_eq!((op.object_name(op.dom(f)), op.object_name(op.cod(f))), ("1", "0"));
        // s becomes a split mono in the dual: d0 .op s = id_X.
        let (s, d0) = (wh.find_morphism("s").unwrap(), wh.find_morphism("d0").unwrap());
        let wop = wh.opposite();
        assert_eq!(wop.compose(d0, s), wop.id(wh.find_object("X").unwrap()));
    }

    #[test]
    fn functor_enumeration_counts() {
        // Functors [1] -> [1]: monotone maps of {0<1}: 3.
        let i = fixtures::chain(1);
        assert_eq!(enumerate_functors(&i, &i, &Budget::unlimited()).unwrap().len(), 3);
        // Functors J -> J: 4 (two constants, identity, swap).
        let j = fixtures::walking_iso();
        assert_eq!(enumerate_functors(&j, &j, &Budget::unlimited()).unwrap().len(), 4);
    }
}
