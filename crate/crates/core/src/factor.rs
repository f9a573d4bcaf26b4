//! Lifting problems, LLP/RLP classes, retracts, factorizations and weak
//! factorization systems.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{FinCat, Mor, MorSet};

/// Commutative square `g u = v f` asking for a diagonal `h: cod f -> dom g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LiftingProblem {
    pub f: Mor,
    pub g: Mor,
    pub u: Mor,
    pub v: Mor,
}

impl LiftingProblem {
    pub fn commutes(&self, c: &FinCat) -> bool {
        c.dom(self.u) == c.dom(self.f)
            && c.cod(self.u) == c.dom(self.g)
            && c.dom(self.v) == c.cod(self.f)
            && c.cod(self.v) == c.cod(self.g)
            && c.compose(self.g, self.u) == c.compose(self.v, self.f)
    }
}

/// Every diagonal `h` with `h f = u` and `g h = v`.
pub fn solve_lifting(c: &FinCat, p: &LiftingProblem) -> Result<Vec<Mor>> {
    if !p.commutes(c) {
        return Err(Error::Precondition(format!(
            "square ({}, {}, {}, {}) does not commute",
            c.mor_name(p.f),
            c.mor_name(p.g),
            c.mor_name(p.u),
            c.mor_name(p.v)
        )));
    }
    Ok(diagonals(c, p))
}

fn diagonals(c: &FinCat, p: &LiftingProblem) -> Vec<Mor> {
    c.hom(c.cod(p.f), c.dom(p.g))
        .iter()
        .copied()
        .filter(|&h| c.compose(h, p.f) == p.u && c.compose(p.g, h) == p.v)
        .collect()
}

/// All commuting squares from `f` to `g`.
pub fn squares(c: &FinCat, f: Mor, g: Mor) -> impl Iterator<Item = LiftingProblem> + '_ {
    let us = c.hom(c.dom(f), c.dom(g));
    let vs = c.hom(c.cod(f), c.cod(g));
    us.iter().flat_map(move |&u| {
        vs.iter().filter_map(move |&v| (c.compose(g, u) == c.compose(v, f)).then_some(LiftingProblem { f, g, u, v }))
    })
}

/// First commuting square without a diagonal, if any.
pub fn lifting_obstruction(c: &FinCat, f: Mor, g: Mor) -> Option<LiftingProblem> {
    squares(c, f, g).find(|p| diagonals(c, p).is_empty())
}

pub fn has_llp(c: &FinCat, f: Mor, g: Mor) -> bool {
    lifting_obstruction(c, f, g).is_none()
}

/// Precomputed lifting relation `lifts[f][g]` = f has the LLP against g.
#[derive(Clone, Debug)]
pub struct LiftingTable {
    n: usize,
    lifts: Vec<bool>,
}

impl LiftingTable {
    pub fn new(c: &FinCat) -> Self {
        let n = c.num_morphisms();
        let mut lifts = vec![false; n * n];
        for f in c.morphisms() {
            for g in c.morphisms() {
                lifts[f * n + g] = has_llp(c, f, g);
            }
        }
        LiftingTable { n, lifts }
    }

    pub fn lifts(&self, f: Mor, g: Mor) -> bool {
        self.lifts[f * self.n + g]
    }

    pub fn llp(&self, s: &MorSet) -> MorSet {
        (0..self.n).filter(|&f| s.iter().all(|&g| self.lifts(f, g))).collect()
    }

    pub fn rlp(&self, s: &MorSet) -> MorSet {
        (0..self.n).filter(|&g| s.iter().all(|&f| self.lifts(f, g))).collect()
    }
}

/// Morphisms with the LLP against every member of `s`.
pub fn llp_class(c: &FinCat, s: &MorSet) -> MorSet {
    c.morphisms().filter(|&f| s.iter().all(|&g| has_llp(c, f, g))).collect()
}

/// Morphisms with the RLP against every member of `s`.
pub fn rlp_class(c: &FinCat, s: &MorSet) -> MorSet {
    c.morphisms().filter(|&g| s.iter().all(|&f| has_llp(c, f, g))).collect()
}

/// Retract diagram exhibiting `f: A -> B` as a retract of `g: A' -> B'`:
/// `r i = id_A`, `q j = id_B`, `g i = j f`, `f r = q g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RetractWitness {
    pub i: Mor,
    pub r: Mor,
    pub j: Mor,
    pub q: Mor,
}

impl RetractWitness {
    pub fn verify(&self, c: &FinCat, f: Mor, g: Mor) -> bool {
        let (a, b) = (c.dom(f), c.cod(f));
        let ok_types = c.dom(self.i) == a
            && c.cod(self.i) == c.dom(g)
            && c.dom(self.r) == c.dom(g)
            && c.cod(self.r) == a
            && c.dom(self.j) == b
            && c.cod(self.j) == c.cod(g)
            && c.dom(self.q) == c.cod(g)
            && c.cod(self.q) == b;
        ok_types
            && c.compose(self.r, self.i) == c.id(a)
            && c.compose(self.q, self.j) == c.id(b)
            && c.compose(g, self.i) == c.compose(self.j, f)
            && c.compose(f, self.r) == c.compose(self.q, g)
    }
}

/// First retract witness in lexicographic order of `(i, r, j, q)`.
pub fn is_retract(c: &FinCat, f: Mor, g: Mor) -> Option<RetractWitness> {
    let (a, b) = (c.dom(f), c.cod(f));
    let (a2, b2) = (c.dom(g), c.cod(g));
    for &i in c.hom(a, a2) {
        for &r in c.hom(a2, a) {
            if c.compose(r, i) != c.id(a) {
                continue;
            }
            for &j in c.hom(b, b2) {
                if c.compose(g, i) != c.compose(j, f) {
                    continue;
                }
                for &q in c.hom(b2, b) {
                    let w = RetractWitness { i, r, j, q };
                    if c.compose(q, j) == c.id(b) && c.compose(f, r) == c.compose(q, g) {
                        return Some(w);
                    }
                }
            }
        }
    }
    None
}

/// All pairs `(i, p)` with `p i = f`, ordered by the middle object, then `i`, then `p`.
pub fn factorizations(c: &FinCat, f: Mor) -> Vec<(Mor, Mor)> {
    let (a, b) = (c.dom(f), c.cod(f));
    let mut out = Vec::new();
    for mid in c.objects() {
        for &i in c.hom(a, mid) {
            for &p in c.hom(mid, b) {
                if c.compose(p, i) == f {
                    out.push((i, p));
                }
            }
        }
    }
    out
}

/// First factorization with `i` in `l` and `p` in `r`.
pub fn factor_through(c: &FinCat, f: Mor, l: &MorSet, r: &MorSet) -> Option<(Mor, Mor)> {
    factorizations(c, f).into_iter().find(|(i, p)| l.contains(i) && r.contains(p))
}

/// Clause-by-clause outcome of [`validate_wfs`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WfsReport {
    /// First morphism without an (L, R) factorization.
    pub factorization_failure: Option<String>,
    /// Members of `llp(R)` missing from `L`, and members of `L` outside `llp(R)`.
    pub l_mismatch: Vec<String>,
    pub r_mismatch: Vec<String>,
}

impl WfsReport {
    pub fn is_valid(&self) -> bool {
        self.factorization_failure.is_none() && self.l_mismatch.is_empty() && self.r_mismatch.is_empty()
    }
}

pub fn validate_wfs(c: &FinCat, l: &MorSet, r: &MorSet) -> WfsReport {
    let factorization_failure =
        c.morphisms().find(|&f| factor_through(c, f, l, r).is_none()).map(|f| c.mor_name(f).to_string());
    let lr = llp_class(c, r);
    let rl = rlp_class(c, l);
    WfsReport {
        factorization_failure,
        l_mismatch: c.names(&lr.symmetric_difference(l).copied().collect()),
        r_mismatch: c.names(&rl.symmetric_difference(r).copied().collect()),
    }
}

/// Which lifting hypothesis `retract_of_factor` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `f` has the LLP against `p`; conclusion: `f` is a retract of `i`.
    Left,
    /// `f` has the RLP against `i`; conclusion: `f` is a retract of `p`.
    Right,
}

/// For `f = p i`, solves the lifting problem of `f` against `p` (top `i`,
/// bottom `id`) or of `i` against `f` (top `id`, bottom `p`) and returns the
/// resulting retract diagram.
pub fn retract_of_factor(c: &FinCat, f: Mor, i: Mor, p: Mor, side: Side) -> Result<RetractWitness> {
    if c.try_compose(p, i) != Some(f) {
        return Err(Error::Precondition(format!("{} is not {} . {}", c.mor_name(f), c.mor_name(p), c.mor_name(i))));
    }
    let (a, b) = (c.dom(f), c.cod(f));
    match side {
        Side::Left => {
            let prob = LiftingProblem { f, g: p, u: i, v: c.id(b) };
            let l = *solve_lifting(c, &prob)?.first().ok_or_else(|| {
                Error::Precondition(format!("{} has no lift against {}", c.mor_name(f), c.mor_name(p)))
            })?;
            Ok(RetractWitness { i: c.id(a), r: c.id(a), j: l, q: p })
        }
        Side::Right => {
            let prob = LiftingProblem { f: i, g: f, u: c.id(a), v: p };
            let l = *solve_lifting(c, &prob)?.first().ok_or_else(|| {
                Error::Precondition(format!("{} has no lift against {}", c.mor_name(i), c.mor_name(f)))
            })?;
            Ok(RetractWitness { i, r: l, j: c.id(b), q: c.id(b) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn m(c: &FinCat, n: &str) -> Mor {
        c.find_morphism(n).unwrap()
    }

    #[test]
    fn iso_has_forced_diagonal() {
        let j = fixtures::walking_iso();
        let (u, v) = (m(&j, "u"), m(&j, "v"));
        let a = j.find_object("A").unwrap();
        // f = u iso, g = id_A, top u' = id_A, bottom v.
        let p = LiftingProblem { f: u, g: j.id(a), u: j.id(a), v };
        assert_eq!(solve_lifting(&j, &p).unwrap(), vec![v]);
    }

    #[test]
    fn wh_lifting_has_h() {
        let wh = fixtures::walking_homotopy();
        let y = wh.find_object("Y").unwrap();
        let p = LiftingProblem { f: m(&wh, "d0"), g: wh.id(y), u: m(&wh, "f"), v: m(&wh, "h") };
        assert_eq!(solve_lifting(&wh, &p).unwrap(), vec![m(&wh, "h")]);
    }

    #[test]
    fn missing_diagonal() {
        // In A => B: f against id_B with top f? Use the square f / g with u = id_A... f, g differ.
        let pp = fixtures::parallel_pair();
        let (f, g) = (m(&pp, "f"), m(&pp, "g"));
        let a = pp.find_object("A").unwrap();
        let b = pp.find_object("B").unwrap();
        // g . id_A = id_B . g: lifting f against g with u = id_A, v = id_B needs h: B -> A.
        let p = LiftingProblem { f: g, g, u: pp.id(a), v: pp.id(b) };
        assert!(solve_lifting(&pp, &p).unwrap().is_empty());
        let bad = LiftingProblem { f, g, u: pp.id(a), v: pp.id(b) };
        assert!(solve_lifting(&pp, &bad).is_err());
    }

    #[test]
    fn llp_of_empty_is_everything_and_contains_isos() {
        let wh = fixtures::walking_homotopy();
        assert_eq!(llp_class(&wh, &MorSet::new()), wh.all_morphisms());
        let s: MorSet = [m(&wh, "s"), m(&wh, "h")].into_iter().collect();
        assert!(wh.isos().is_subset(&llp_class(&wh, &s)));
    }

    #[test]
    fn retract_examples() {
        let wh = fixtures::walking_homotopy();
        let f = m(&wh, "f");
        let w = is_retract(&wh, f, f).unwrap();
        assert!(w.verify(&wh, f, f));
        let x = wh.find_object("X").unwrap();
        let w = is_retract(&wh, wh.id(x), m(&wh, "e0")).unwrap();
        assert!(w.verify(&wh, wh.id(x), m(&wh, "e0")));
        assert_eq!((w.i, w.r), (m(&wh, "d0"), m(&wh, "s")));
        // f: X -> Y cannot be a retract of d0: X -> W (no map W -> Y ... Y -> W).
        assert!(is_retract(&wh, f, m(&wh, "d0")).is_none());
    }

    #[test]
    fn factorization_examples() {
        let wh = fixtures::walking_homotopy();
        let x = wh.find_object("X").unwrap();
        let w = wh.find_object("W").unwrap();
        assert!(factorizations(&wh, wh.id(x)).contains(&(wh.id(x), wh.id(x))));
        assert!(factorizations(&wh, m(&wh, "f")).contains(&(m(&wh, "d0"), m(&wh, "h"))));
        let through_w: Vec<_> = factorizations(&wh, wh.id(x)).into_iter().filter(|(i, _)| wh.cod(*i) == w).collect();
        assert_eq!(through_w, vec![(m(&wh, "d0"), m(&wh, "s")), (m(&wh, "d1"), m(&wh, "s"))]);
    }

    #[test]
    fn wfs_examples() {
        let wh = fixtures::walking_homotopy();
        let isos = wh.isos();
        let all = wh.all_morphisms();
        assert!(validate_wfs(&wh, &isos, &all).is_valid());
        assert!(validate_wfs(&wh, &all, &isos).is_valid());
        let r = validate_wfs(&wh, &isos, &isos);
        assert_eq!(r.factorization_failure.as_deref(), Some("d0"));
    }

    #[test]
    fn retract_of_factor_examples() {
        let j = fixtures::walking_iso();
        let u = m(&j, "u");
        let b = j.find_object("B").unwrap();
        let w = retract_of_factor(&j, u, u, j.id(b), Side::Left).unwrap();
        assert!(w.verify(&j, u, u));
        let wh = fixtures::walking_homotopy();
        // f = h d0; f has no LLP against h (square with u = d0, v = id_Y has lift? needs l: Y -> W).
        let err = retract_of_factor(&wh, m(&wh, "f"), m(&wh, "d0"), m(&wh, "h"), Side::Left);
        assert!(err.is_err());
    }
}
