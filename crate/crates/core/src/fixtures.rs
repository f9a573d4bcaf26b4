//! Built-in categories and model structures used by tests, benches and the
//! CLI (`--builtin`).

use std::collections::BTreeSet;

use crate::fincat::{CatBuilder, FinCat, Mor, MorSet};
use crate::model::ModelStructure;

/// A subcategory of finite sets: objects are sizes, morphisms are functions
/// (as value tables), and composites are looked up among the declared
/// functions. Distinct morphisms must be distinct functions.
pub struct ConcreteCat {
    name: String,
    objects: Vec<(String, usize)>,
    morphisms: Vec<(String, usize, usize, Vec<usize>)>,
}

impl ConcreteCat {
    pub fn new(name: &str) -> Self {
        ConcreteCat { name: name.into(), objects: vec![], morphisms: vec![] }
    }

    pub fn object(&mut self, name: &str, size: usize) -> usize {
        self.objects.push((name.into(), size));
        self.objects.len() - 1
    }

    pub fn morphism(&mut self, name: &str, dom: usize, cod: usize, table: &[usize]) {
        assert_eq!(table.len(), self.objects[dom].1, "table of {name} has the wrong length");
        assert!(table.iter().all(|&v| v < self.objects[cod].1), "table of {name} leaves its codomain");
        self.morphisms.push((name.into(), dom, cod, table.to_vec()));
    }

    /// Builds the table; panics if a composite is not among the declared
    /// functions (the fixture would not be closed under composition).
    pub fn build(self) -> FinCat {
        let mut b = CatBuilder::new(self.name.clone());
        for (name, _) in &self.objects {
            b.object(name.clone());
        }
        for (name, d, c, _) in &self.morphisms {
            b.morphism(name.clone(), *d, *c);
        }
        let n = self.objects.len();
        // Full list with identities first, matching the builder's order.
        let mut all: Vec<(usize, usize, Vec<usize>)> =
            self.objects.iter().enumerate().map(|(i, (_, k))| (i, i, (0..*k).collect())).collect();
        all.extend(self.morphisms.iter().map(|(_, d, c, t)| (*d, *c, t.clone())));
        for (gi, (gd, gc, gt)) in all.iter().enumerate() {
            for (fi, (fd, fc, ft)) in all.iter().enumerate() {
                if fc != gd {
                    continue;
                }
                let comp: Vec<usize> = ft.iter().map(|&x| gt[x]).collect();
                let h = all
                    .iter()
                    .position(|(d, c, t)| d == fd && c == gc && *t == comp)
                    .unwrap_or_else(|| panic!("composite of morphisms {gi} . {fi} is not declared"));
                if gi >= n && fi >= n {
                    b.compose(gi, fi, h);
                }
            }
        }
        b.build().expect("concrete fixture")
    }
}

/// A preorder: `le` lists pairs (x, y) with x <= y; reflexive-transitive
/// closure is taken. Arrows are named `x_y`.
pub fn poset(name: &str, objects: &[&str], le: &[(&str, &str)]) -> FinCat {
    let n = objects.len();
    let idx = |s: &str| objects.iter().position(|o| *o == s).expect("unknown poset element");
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for (x, y) in le {
        rel[idx(x)][idx(y)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    let mut b = CatBuilder::new(name);
    for o in objects {
        b.object(*o);
    }
    let mut arrow = vec![vec![usize::MAX; n]; n];
    for (i, row) in arrow.iter_mut().enumerate() {
        row[i] = i;
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rel[i][j] {
                let k = b.morphism(format!("{}_{}", objects[i], objects[j]), i, j);
                arrow[i][j] = n + k;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && rel[i][j] && rel[j][k] {
                    b.compose(arrow[j][k], arrow[i][j], arrow[i][k]);
                }
            }
        }
    }
    b.build().expect("poset fixture")
}

/// One object, one morphism.
pub fn terminal() -> FinCat {
    poset("one", &["*"], &[])
}

/// The ordinal `[n] = {0 < 1 < ... < n}`.
pub fn chain(n: usize) -> FinCat {
    let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let le: Vec<(&str, &str)> = (0..n).map(|i| (refs[i], refs[i + 1])).collect();
    poset(&format!("chain{n}"), &refs, &le)
}

/// `bot < a, b < top`.
pub fn lattice_2x2() -> FinCat {
    poset("lattice2x2", &["bot", "a", "b", "top"], &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")])
}

/// `x -> y -> z` with the composite named `gf`.
pub fn chain_example() -> FinCat {
    let mut b = CatBuilder::new("chain3");
    let x = b.object("x");
    let y = b.object("y");
    let z = b.object("z");
    b.morphism("f", x, y);
    b.morphism("g", y, z);
    b.morphism("gf", x, z);
    let (f, g, gf) = (3, 4, 5);
    b.compose(g, f, gf);
    b.build().unwrap()
}

/// Walking isomorphism `J`: `u: A -> B`, `v: B -> A`, mutually inverse.
pub fn walking_iso() -> FinCat {
    let mut c = ConcreteCat::new("J");
    let a = c.object("A", 1);
    let b = c.object("B", 1);
    c.morphism("u", a, b, &[0]);
    c.morphism("v", b, a, &[0]);
    c.build()
}

/// The cyclic group of order `n` as a one-object category (rotations `r1..`).
pub fn cyclic_group(n: usize) -> FinCat {
    let mut c = ConcreteCat::new(&format!("Z{n}"));
    let o = c.object("*", n);
    for k in 1..n {
        let table: Vec<usize> = (0..n).map(|i| (i + k) % n).collect();
        c.morphism(&format!("r{k}"), o, o, &table);
    }
    c.build()
}

/// `A => B` with two parallel arrows `f`, `g`.
pub fn parallel_pair() -> FinCat {
    let mut b = CatBuilder::new("pair");
    let a = b.object("A");
    let c = b.object("B");
    b.morphism("f", a, c);
    b.morphism("g", a, c);
    b.build().unwrap()
}

/// Walking homotopy `WH`: objects `X, W, Y`; `d0, d1: X -> W`, `s: W -> X`,
/// `e0 = d0 s`, `e1 = d1 s`, `f, g: X -> Y`, `h: W -> Y` with `h d0 = f`,
/// `h d1 = g`, plus `fs`, `gs`. Realized inside finite sets
/// (`X = 1`, `W = Y = 2`, `h` a bijection), which fixes every composite.
pub fn walking_homotopy() -> FinCat {
    let mut c = ConcreteCat::new("WH");
    let x = c.object("X", 1);
    let w = c.object("W", 2);
    let y = c.object("Y", 2);
    c.morphism("d0", x, w, &[0]);
    c.morphism("d1", x, w, &[1]);
    c.morphism("s", w, x, &[0, 0]);
    c.morphism("e0", w, w, &[0, 0]);
    c.morphism("e1", w, w, &[1, 1]);
    c.morphism("f", x, y, &[0]);
    c.morphism("g", x, y, &[1]);
    c.morphism("h", w, y, &[0, 1]);
    c.morphism("fs", w, y, &[0, 0]);
    c.morphism("gs", w, y, &[1, 1]);
    c.build()
}

/// `Sigma = {identities, s}` on [`walking_homotopy`].
pub fn wh_sigma(wh: &FinCat) -> MorSet {
    let mut s = wh.identity_set();
    s.insert(wh.find_morphism("s").expect("WH has s"));
    s
}

/// Underlying 1-category of the walking equivalence: `u: P -> Q`,
/// `v: Q -> P`, `e0 = v u`, `e1 = u v`, with `u v u = u`, `v u v = v`.
pub fn walking_equivalence_1cat() -> FinCat {
    let mut b = CatBuilder::new("E");
    let p = b.object("P");
    let q = b.object("Q");
    b.morphism("u", p, q);
    b.morphism("v", q, p);
    b.morphism("e0", p, p);
    b.morphism("e1", q, q);
    let (u, v, e0, e1) = (2, 3, 4, 5);
    b.compose(v, u, e0);
    b.compose(u, v, e1);
    b.compose(u, e0, u);
    b.compose(e0, v, v);
    b.compose(e1, u, u);
    b.compose(v, e1, v);
    b.compose(e0, e0, e0);
    b.compose(e1, e1, e1);
    b.build().unwrap()
}

fn set_of(c: &FinCat, names: &[&str]) -> MorSet {
    names.iter().map(|n| c.find_morphism(n).unwrap_or_else(|| panic!("no morphism {n}"))).collect()
}

/// `W = isos, F = coF = all` on the 2x2 lattice.
pub fn trivial_2x2() -> ModelStructure {
    let c = lattice_2x2();
    let isos = c.isos();
    let all = c.all_morphisms();
    ModelStructure::new("trivial_2x2", c, isos, all.clone(), all)
}

/// Trivial structure on any category.
pub fn trivial_on(c: FinCat) -> ModelStructure {
    let isos = c.isos();
    let all = c.all_morphisms();
    let name = format!("trivial_{}", c.name());
    ModelStructure::new(name, c, isos, all.clone(), all)
}

/// `W = all, coF = all, F = isos` on the 2x2 lattice: only `top` is fibrant.
pub fn lattice_all_w_cof() -> ModelStructure {
    let c = lattice_2x2();
    let all = c.all_morphisms();
    let isos = c.isos();
    ModelStructure::new("lattice_wcof", c, all.clone(), isos, all)
}

/// `W = all, F = all, coF = isos` on the 2x2 lattice: only `bot` is cofibrant.
pub fn lattice_all_w_fib() -> ModelStructure {
    let c = lattice_2x2();
    let all = c.all_morphisms();
    let isos = c.isos();
    ModelStructure::new("lattice_wfib", c, all.clone(), all, isos)
}

/// A structure on `[2]` with a nontrivial weak equivalence and a
/// non-fibrant object: `W = {ids, 0_1}`, `F = {ids, 1_2}`, `coF = all`.
pub fn chain2_mixed() -> ModelStructure {
    let c = chain(2);
    let ids = c.identity_set();
    let w: MorSet = ids.union(&set_of(&c, &["0_1"])).copied().collect();
    let f: MorSet = ids.union(&set_of(&c, &["1_2"])).copied().collect();
    let all = c.all_morphisms();
    ModelStructure::new("chain2_mixed", c, w, f, all)
}

/// Every built-in model structure that passes validation.
pub fn valid_model_fixtures() -> Vec<ModelStructure> {
    vec![
        trivial_2x2(),
        lattice_all_w_cof(),
        lattice_all_w_fib(),
        chain2_mixed(),
        trivial_on(chain(1)),
        trivial_on(terminal()),
    ]
}

/// Names of the morphisms in a class, for messages.
pub fn class_names(c: &FinCat, s: &BTreeSet<Mor>) -> Vec<String> {
    c.names(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::validate_category;

    #[test]
    fn fixtures_are_categories() {
        for c in [
            terminal(),
            chain(3),
            lattice_2x2(),
            chain_example(),
            walking_iso(),
            cyclic_group(3),
            parallel_pair(),
            walking_homotopy(),
            walking_equivalence_1cat(),
        ] {
            assert!(validate_category(&c).is_empty(), "{} invalid: {:?}", c.name(), validate_category(&c));
        }
    }

    #[test]
    fn wh_relations() {
        let wh = walking_homotopy();
        let m = |n: &str| wh.find_morphism(n).unwrap();
        let x = wh.find_object("X").unwrap();
        assert_eq!(wh.compose(m("s"), m("d0")), wh.id(x));
        assert_eq!(wh.compose(m("s"), m("d1")), wh.id(x));
        assert_eq!(wh.compose(m("h"), m("d0")), m("f"));
        assert_eq!(wh.compose(m("h"), m("d1")), m("g"));
        assert_eq!(wh.compose(m("d0"), m("s")), m("e0"));
        assert_eq!(wh.compose(m("e1"), m("e0")), m("e1"));
        assert_eq!(wh.compose(m("h"), m("e0")), m("fs"));
    }
}
