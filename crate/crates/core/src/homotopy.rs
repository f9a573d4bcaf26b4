//! Cylinders and left homotopies relative to a class `Sigma`, Quillen
//! cylinders, the germ relation, gluing, whiskering, q-normalization, path
//! objects and right homotopies.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{factor_through, solve_lifting, LiftingProblem};
use crate::fincat::{
    copair, coproduct, pair_into, product, pullback, pushout, terminal, unique_arrow, Cone, FinCat, Mor, MorSet, Obj,
};
use crate::model::{cofibrant_objects, fibrant_objects, ModelStructure};
use crate::search::Budget;
use crate::util::Dsu;

/// `X --d0,d1--> W --s--> Z` with `s d0 = s d1 = x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cylinder {
    pub src: Obj,
    pub w: Obj,
    pub z: Obj,
    pub d0: Mor,
    pub d1: Mor,
    pub s: Mor,
    pub x: Mor,
}

impl Cylinder {
    /// Objects are read off the arrows; `x` is computed as `s d0`.
    pub fn new(c: &FinCat, d0: Mor, d1: Mor, s: Mor) -> Result<Self> {
        let x = c
            .try_compose(s, d0)
            .ok_or_else(|| Error::Precondition(format!("{} . {} is not composable", c.mor_name(s), c.mor_name(d0))))?;
        let cyl = Cylinder { src: c.dom(d0), w: c.cod(d0), z: c.cod(s), d0, d1, s, x };
        cyl.check(c).map_err(Error::Precondition)?;
        Ok(cyl)
    }

    /// `(X, X; id, id, id, id)`.
    pub fn identity(c: &FinCat, x: Obj) -> Self {
        let i = c.id(x);
        Cylinder { src: x, w: x, z: x, d0: i, d1: i, s: i, x: i }
    }

    pub fn is_degenerate(&self) -> bool {
        self.d0 == self.d1
    }

    /// Typing and the equations `s d0 = x = s d1`.
    pub fn check(&self, c: &FinCat) -> std::result::Result<(), String> {
        let typed = c.dom(self.d0) == self.src
            && c.dom(self.d1) == self.src
            && c.cod(self.d0) == self.w
            && c.cod(self.d1) == self.w
            && c.dom(self.s) == self.w
            && c.cod(self.s) == self.z
            && c.dom(self.x) == self.src
            && c.cod(self.x) == self.z;
        if !typed {
            return Err(format!("cylinder {} is ill-typed", self.show(c)));
        }
        if c.compose(self.s, self.d0) != self.x || c.compose(self.s, self.d1) != self.x {
            return Err(format!("cylinder {}: s d0 = x = s d1 fails", self.show(c)));
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Cylinder { d0: self.d1, d1: self.d0, ..*self }
    }

    pub fn show(&self, c: &FinCat) -> String {
        format!("({}, {}; {}, {})", c.mor_name(self.d0), c.mor_name(self.d1), c.mor_name(self.s), c.mor_name(self.x))
    }
}

/// `H = (C, h)`: a homotopy from `f = h d0` to `g = h d1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Homotopy {
    pub cyl: Cylinder,
    pub h: Mor,
    pub f: Mor,
    pub g: Mor,
}

impl Homotopy {
    pub fn new(c: &FinCat, cyl: Cylinder, h: Mor) -> Result<Self> {
        let f = c.try_compose(h, cyl.d0);
        let g = c.try_compose(h, cyl.d1);
        match (f, g) {
            (Some(f), Some(g)) => Ok(Homotopy { cyl, h, f, g }),
            _ => Err(Error::Precondition(format!("{} does not start at W of {}", c.mor_name(h), cyl.show(c)))),
        }
    }

    /// `I_f`: the identity cylinder on `dom f` with `h = f`.
    pub fn identity(c: &FinCat, f: Mor) -> Self {
        Homotopy { cyl: Cylinder::identity(c, c.dom(f)), h: f, f, g: f }
    }

    pub fn check(&self, c: &FinCat, sigma: &MorSet) -> std::result::Result<(), String> {
        self.cyl.check(c)?;
        if !sigma.contains(&self.cyl.s) {
            return Err(format!("{} is not in Sigma", c.mor_name(self.cyl.s)));
        }
        if c.dom(self.h) != self.cyl.w {
            return Err(format!("{} does not start at W", c.mor_name(self.h)));
        }
        if c.compose(self.h, self.cyl.d0) != self.f || c.compose(self.h, self.cyl.d1) != self.g {
            return Err(format!("{}: h d0 = f, h d1 = g fails", self.show(c)));
        }
        Ok(())
    }

    /// Cylinder collapses (`d0 = d1`) or `h` factors through `s`; either
    /// way every probe sends the homotopy to an identity.
    pub fn is_trivial(&self, c: &FinCat) -> bool {
        self.cyl.is_degenerate() || c.hom(self.cyl.z, c.cod(self.h)).iter().any(|&r| c.compose(r, self.cyl.s) == self.h)
    }

    pub fn show(&self, c: &FinCat) -> String {
        format!("{} => {} via {} h={}", c.mor_name(self.f), c.mor_name(self.g), self.cyl.show(c), c.mor_name(self.h))
    }
}

fn require_identities(c: &FinCat, sigma: &MorSet) -> Result<()> {
    match c.objects().map(|o| c.id(o)).find(|i| !sigma.contains(i)) {
        Some(i) => Err(Error::Precondition(format!("Sigma lacks the identity {}", c.mor_name(i)))),
        None => Ok(()),
    }
}

/// Every cylinder for `x` with `s` in `sigma`, ordered by `s`, then `d0`, then `d1`.
pub fn enumerate_cylinders(c: &FinCat, sigma: &MorSet, x: Obj, budget: &Budget) -> Result<Vec<Cylinder>> {
    require_identities(c, sigma)?;
    let mut out = Vec::new();
    for &s in sigma {
        let w = c.dom(s);
        let ds = c.hom(x, w);
        budget.charge("cylinders", (ds.len() * ds.len()) as u64)?;
        for &d0 in ds {
            let xm = c.compose(s, d0);
            for &d1 in ds {
                if c.compose(s, d1) == xm {
                    out.push(Cylinder { src: x, w, z: c.cod(s), d0, d1, s, x: xm });
                }
            }
        }
    }
    Ok(out)
}

/// Every homotopy `f => g`.
pub fn enumerate_homotopies(c: &FinCat, sigma: &MorSet, f: Mor, g: Mor, budget: &Budget) -> Result<Vec<Homotopy>> {
    if !c.parallel(f, g) {
        return Err(Error::Precondition(format!("{} and {} are not parallel", c.mor_name(f), c.mor_name(g))));
    }
    let y = c.cod(f);
    let mut out = Vec::new();
    for cyl in enumerate_cylinders(c, sigma, c.dom(f), budget)? {
        for &h in c.hom(cyl.w, y) {
            if c.compose(h, cyl.d0) == f && c.compose(h, cyl.d1) == g {
                out.push(Homotopy { cyl, h, f, g });
            }
        }
    }
    Ok(out)
}

/// Every homotopy between any two parallel arrows of `c`.
pub fn all_homotopies(c: &FinCat, sigma: &MorSet, budget: &Budget) -> Result<Vec<Homotopy>> {
    let mut out = Vec::new();
    for x in c.objects() {
        for cyl in enumerate_cylinders(c, sigma, x, budget)? {
            for y in c.objects() {
                for &h in c.hom(cyl.w, y) {
                    budget.charge("homotopies", 1)?;
                    out.push(Homotopy { cyl, h, f: c.compose(h, cyl.d0), g: c.compose(h, cyl.d1) });
                }
            }
        }
    }
    Ok(out)
}

/// Evidence that a cylinder is a Quillen cylinder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QCylinderCert {
    pub cyl: Cylinder,
    /// `X ⊔ X` with injections `i0`, `i1`.
    pub coproduct: Cone,
    /// `(d0|d1): X ⊔ X -> W`.
    pub copair: Mor,
    /// `s` is a fibration.
    pub fibrant: bool,
}

/// Certificate iff `Z = X`, `x = id`, `s ∈ W` and `(d0|d1) ∈ coF`.
pub fn is_q_cylinder(m: &ModelStructure, cyl: &Cylinder) -> Result<Option<QCylinderCert>> {
    let c = &m.base;
    let cop = coproduct(c, cyl.src, cyl.src)
        .ok_or_else(|| Error::Precondition(format!("no coproduct {0} ⊔ {0}", c.object_name(cyl.src))))?;
    if cyl.z != cyl.src || cyl.x != c.id(cyl.src) || !m.w.contains(&cyl.s) {
        return Ok(None);
    }
    let Some(k) = copair(c, &cop, cyl.d0, cyl.d1) else {
        return Ok(None);
    };
    if !m.cof.contains(&k) {
        return Ok(None);
    }
    let nabla = copair(c, &cop, c.id(cyl.src), c.id(cyl.src)).expect("codiagonal exists");
    debug_assert_eq!(c.compose(cyl.s, k), nabla);
    Ok(Some(QCylinderCert { cyl: *cyl, coproduct: cop, copair: k, fibrant: m.f.contains(&cyl.s) }))
}

/// Outcome of [`lemma2_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma2Report {
    pub d0_trivial_cofibration: bool,
    pub d1_trivial_cofibration: bool,
}

impl Lemma2Report {
    pub fn pass(&self) -> bool {
        self.d0_trivial_cofibration && self.d1_trivial_cofibration
    }
}

/// Both ends of a Quillen cylinder on a cofibrant object are trivial cofibrations.
pub fn lemma2_check(m: &ModelStructure, cert: &QCylinderCert) -> Result<Lemma2Report> {
    let x = cert.cyl.src;
    if !cofibrant_objects(m)?.contains(&x) {
        return Err(Error::Precondition(format!("{} is not cofibrant", m.base.object_name(x))));
    }
    let tc = m.trivial_cofibrations();
    Ok(Lemma2Report {
        d0_trivial_cofibration: tc.contains(&cert.cyl.d0),
        d1_trivial_cofibration: tc.contains(&cert.cyl.d1),
    })
}

/// Same data with `d0`, `d1` exchanged: a homotopy `g => f`.
pub fn invert(h: &Homotopy) -> Homotopy {
    Homotopy { cyl: h.cyl.swapped(), h: h.h, f: h.g, g: h.f }
}

/// `H l = (C l, h)` with `C l = (d0 l, d1 l; s, x l)`.
pub fn whisker_left(c: &FinCat, h: &Homotopy, l: Mor) -> Result<Homotopy> {
    if c.cod(l) != h.cyl.src {
        return Err(Error::Precondition(format!("{} does not end at the source of {}", c.mor_name(l), h.show(c))));
    }
    let cyl = Cylinder {
        src: c.dom(l),
        d0: c.compose(h.cyl.d0, l),
        d1: c.compose(h.cyl.d1, l),
        x: c.compose(h.cyl.x, l),
        ..h.cyl
    };
    Ok(Homotopy { cyl, h: h.h, f: c.compose(h.f, l), g: c.compose(h.g, l) })
}

/// `r H = (C, r h)`.
pub fn whisker_right(c: &FinCat, r: Mor, h: &Homotopy) -> Result<Homotopy> {
    if c.dom(r) != c.cod(h.h) {
        return Err(Error::Precondition(format!("{} does not start at the target of {}", c.mor_name(r), h.show(c))));
    }
    Ok(Homotopy { cyl: h.cyl, h: c.compose(r, h.h), f: c.compose(r, h.f), g: c.compose(r, h.g) })
}

/// `(phi, psi)` with `phi d0 = d0'`, `phi d1 = d1'`, `psi s = s' phi`, `psi x = x'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CylMorphism {
    pub phi: Mor,
    pub psi: Mor,
}

impl CylMorphism {
    pub fn verify(&self, c: &FinCat, a: &Cylinder, b: &Cylinder) -> bool {
        a.src == b.src
            && c.dom(self.phi) == a.w
            && c.cod(self.phi) == b.w
            && c.dom(self.psi) == a.z
            && c.cod(self.psi) == b.z
            && c.compose(self.phi, a.d0) == b.d0
            && c.compose(self.phi, a.d1) == b.d1
            && c.compose(self.psi, a.s) == c.compose(b.s, self.phi)
            && c.compose(self.psi, a.x) == b.x
    }
}

/// Every morphism of cylinders `a -> b`; empty when the cylinders are for different objects.
pub fn cylinder_morphisms(c: &FinCat, a: &Cylinder, b: &Cylinder) -> Vec<CylMorphism> {
    if a.src != b.src {
        return Vec::new();
    }
    let mut out = Vec::new();
    for &phi in c.hom(a.w, b.w) {
        if c.compose(phi, a.d0) != b.d0 || c.compose(phi, a.d1) != b.d1 {
            continue;
        }
        for &psi in c.hom(a.z, b.z) {
            let m = CylMorphism { phi, psi };
            if m.verify(c, a, b) {
                out.push(m);
            }
        }
    }
    out
}

/// A morphism `C -> C'` carrying `H` to `H'` (`h' phi = h`).
pub fn germ_link(c: &FinCat, a: &Homotopy, b: &Homotopy) -> Option<CylMorphism> {
    cylinder_morphisms(c, &a.cyl, &b.cyl).into_iter().find(|m| c.compose(b.h, m.phi) == a.h)
}

/// Labels of the germ equivalence classes (closure of [`germ_link`] edges).
pub fn germ_partition(c: &FinCat, hs: &[Homotopy]) -> Vec<usize> {
    let mut d = Dsu::new(hs.len());
    for i in 0..hs.len() {
        for j in 0..hs.len() {
            if i != j && hs[i].f == hs[j].f && hs[i].g == hs[j].g && germ_link(c, &hs[i], &hs[j]).is_some() {
                d.union(i, j);
            }
        }
    }
    d.labels()
}

/// Germ classes of the homotopies `f => g`.
pub fn germ_classes(c: &FinCat, sigma: &MorSet, f: Mor, g: Mor, budget: &Budget) -> Result<Vec<Vec<Homotopy>>> {
    let hs = enumerate_homotopies(c, sigma, f, g, budget)?;
    let labels = germ_partition(c, &hs);
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); k];
    for (h, l) in hs.into_iter().zip(labels) {
        out[l].push(h);
    }
    Ok(out)
}

/// The glued homotopy `f => l` of two Quillen homotopies `H: f => g`,
/// `H': g => l` on a cofibrant object, over the pushout of `d1` and `d0'`.
pub fn compose_vertical(m: &ModelStructure, a: &Homotopy, b: &Homotopy) -> Result<Homotopy> {
    let c = &m.base;
    if a.g != b.f || a.cyl.src != b.cyl.src {
        return Err(Error::Precondition(format!("{} and {} are not composable", a.show(c), b.show(c))));
    }
    let x = a.cyl.src;
    if !cofibrant_objects(m)?.contains(&x) {
        return Err(Error::Precondition(format!("{} is not cofibrant", c.object_name(x))));
    }
    for h in [a, b] {
        if is_q_cylinder(m, &h.cyl)?.is_none() {
            return Err(Error::Precondition(format!("{} is not a Quillen homotopy", h.show(c))));
        }
    }
    let sq = pushout(c, a.cyl.d1, b.cyl.d0)?
        .ok_or_else(|| Error::Math(format!("no pushout of {} and {}", c.mor_name(a.cyl.d1), c.mor_name(b.cyl.d0))))?;
    let (alpha, beta) = (sq.p1, sq.p2);
    let out_of = |u: Mor, v: Mor| {
        c.hom(sq.apex, c.cod(u)).iter().copied().find(|&k| c.compose(k, alpha) == u && c.compose(k, beta) == v)
    };
    let s2 = out_of(a.cyl.s, b.cyl.s).ok_or_else(|| Error::Math("no map s'' out of the pushout".into()))?;
    let h2 = out_of(a.h, b.h).ok_or_else(|| Error::Math("no map h'' out of the pushout".into()))?;
    let cyl = Cylinder {
        src: x,
        w: sq.apex,
        z: x,
        d0: c.compose(alpha, a.cyl.d0),
        d1: c.compose(beta, b.cyl.d1),
        s: s2,
        x: c.id(x),
    };
    let out = Homotopy { cyl, h: h2, f: a.f, g: b.g };
    out.check(c, &m.w).map_err(|e| Error::Math(format!("glued homotopy: {e}")))?;
    if is_q_cylinder(m, &cyl)?.is_none() {
        return Err(Error::Math(format!("glued cylinder {} is not a Quillen cylinder", cyl.show(c))));
    }
    Ok(out)
}

/// The three stages of [`to_q_homotopy`] with the cylinder morphisms
/// linking them: `input -> fibrant <- pulled <- output`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QNormalization {
    pub input: Homotopy,
    pub fibrant: Homotopy,
    pub pulled: Homotopy,
    pub output: Homotopy,
    /// `(j, id_Z)`, `(t, x)` and `(p, id_X)`.
    pub links: [CylMorphism; 3],
    pub cert: QCylinderCert,
}

fn step_err(step: usize, msg: impl fmt::Display) -> Error {
    Error::Math(format!("q-normalization step {step}: {msg}"))
}

/// Replaces a homotopy between fibrant-cofibrant objects by a fibrant
/// Quillen homotopy in the same germ class.
pub fn to_q_homotopy(m: &ModelStructure, hm: &Homotopy) -> Result<QNormalization> {
    let c = &m.base;
    let (x, y) = (hm.cyl.src, c.cod(hm.h));
    let fib = fibrant_objects(m)?;
    let cof = cofibrant_objects(m)?;
    for o in [x, y] {
        if !fib.contains(&o) || !cof.contains(&o) {
            return Err(Error::Precondition(format!("{} is not fibrant-cofibrant", c.object_name(o))));
        }
    }
    if !m.w.contains(&hm.cyl.s) {
        return Err(Error::Precondition(format!("{} is not a weak equivalence", c.mor_name(hm.cyl.s))));
    }
    let (af, acof) = (m.trivial_fibrations(), m.trivial_cofibrations());
    let one = terminal(c).expect("fibrant objects imply a terminal object");
    let cyl = hm.cyl;

    // Step 1: s = s~ j with j a trivial cofibration and s~ a fibration; h~ j = h.
    let (j, st) = if m.f.contains(&cyl.s) {
        (c.id(cyl.w), cyl.s)
    } else {
        factor_through(c, cyl.s, &acof, &m.f).ok_or_else(|| step_err(1, "no (coF∩W, F) factorization of s"))?
    };
    let wt = c.cod(j);
    let ht = if c.is_identity(j) {
        hm.h
    } else {
        let prob = LiftingProblem {
            f: j,
            g: unique_arrow(c, y, one).expect("terminal"),
            u: hm.h,
            v: unique_arrow(c, wt, one).expect("terminal"),
        };
        *solve_lifting(c, &prob)?.first().ok_or_else(|| step_err(1, "no lift of h against Y -> 1"))?
    };
    let cyl1 = Cylinder { w: wt, d0: c.compose(j, cyl.d0), d1: c.compose(j, cyl.d1), s: st, ..cyl };
    let h1 = Homotopy { cyl: cyl1, h: ht, f: hm.f, g: hm.g };
    let link1 = CylMorphism { phi: j, psi: c.id(cyl.z) };

    // Step 2: pull s~ back along x; delta_i = (id_X, d~_i), k = h~ t.
    let sq = pullback(c, cyl.x, st)?.ok_or_else(|| step_err(2, "no pullback of x and s~"))?;
    let (sigma, t) = (sq.p1, sq.p2);
    let into =
        |d: Mor| c.hom(x, sq.apex).iter().copied().find(|&k| c.compose(sigma, k) == c.id(x) && c.compose(t, k) == d);
    let delta0 = into(cyl1.d0).ok_or_else(|| step_err(2, "no induced delta0"))?;
    let delta1 = into(cyl1.d1).ok_or_else(|| step_err(2, "no induced delta1"))?;
    let cyl2 = Cylinder { src: x, w: sq.apex, z: x, d0: delta0, d1: delta1, s: sigma, x: c.id(x) };
    let h2 = Homotopy { cyl: cyl2, h: c.compose(ht, t), f: hm.f, g: hm.g };
    let link2 = CylMorphism { phi: t, psi: cyl.x };

    // Step 3: (delta0|delta1) = p (d0'|d1') with p a trivial fibration.
    let cop = coproduct(c, x, x).ok_or_else(|| step_err(3, "no coproduct X ⊔ X"))?;
    let k = copair(c, &cop, delta0, delta1).ok_or_else(|| step_err(3, "no copair (delta0|delta1)"))?;
    let (i, p) = if m.cof.contains(&k) {
        (k, c.id(sq.apex))
    } else {
        factor_through(c, k, &m.cof, &af).ok_or_else(|| step_err(3, "no (coF, F∩W) factorization"))?
    };
    let cyl3 = Cylinder {
        src: x,
        w: c.cod(i),
        z: x,
        d0: c.compose(i, cop.legs[0]),
        d1: c.compose(i, cop.legs[1]),
        s: c.compose(sigma, p),
        x: c.id(x),
    };
    let h3 = Homotopy { cyl: cyl3, h: c.compose(h2.h, p), f: hm.f, g: hm.g };
    let link3 = CylMorphism { phi: p, psi: c.id(x) };

    for (n, (hh, sig)) in [(&h1, &m.w), (&h2, &m.w), (&h3, &m.w)].into_iter().enumerate() {
        hh.check(c, sig).map_err(|e| step_err(n + 1, e))?;
    }
    let checks = [(link1, hm, &h1), (link2, &h2, &h1), (link3, &h3, &h2)];
    for (n, (l, a, b)) in checks.iter().enumerate() {
        if !l.verify(c, &a.cyl, &b.cyl) || c.compose(b.h, l.phi) != a.h {
            return Err(step_err(n + 1, "germ link fails"));
        }
    }
    let cert = is_q_cylinder(m, &cyl3)?.ok_or_else(|| step_err(3, "result is not a Quillen cylinder"))?;
    Ok(QNormalization { input: *hm, fibrant: h1, pulled: h2, output: h3, links: [link1, link2, link3], cert })
}

/// `Y --sigma--> V --(delta0, delta1)--> Y × Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathObject {
    pub y: Obj,
    pub v: Obj,
    pub delta0: Mor,
    pub delta1: Mor,
    pub sigma: Mor,
    pub product: Cone,
    pub pair: Mor,
}

/// `k: X -> V` with `delta0 k = f`, `delta1 k = g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RightHomotopy {
    pub path: PathObject,
    pub k: Mor,
    pub f: Mor,
    pub g: Mor,
}

/// Every factorization of the diagonal of `y` with `sigma ∈ W` and `(delta0, delta1) ∈ F`.
pub fn enumerate_path_objects(m: &ModelStructure, y: Obj) -> Result<Vec<PathObject>> {
    let c = &m.base;
    let prod =
        product(c, y, y).ok_or_else(|| Error::Precondition(format!("no product {0} × {0}", c.object_name(y))))?;
    let idy = c.id(y);
    let mut out = Vec::new();
    for v in c.objects() {
        for &sigma in c.hom(y, v) {
            if !m.w.contains(&sigma) {
                continue;
            }
            for &d0 in c.hom(v, y) {
                for &d1 in c.hom(v, y) {
                    if c.compose(d0, sigma) != idy || c.compose(d1, sigma) != idy {
                        continue;
                    }
                    let pair = pair_into(c, &prod, d0, d1).expect("product");
                    if m.f.contains(&pair) {
                        out.push(PathObject { y, v, delta0: d0, delta1: d1, sigma, product: prod.clone(), pair });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Converts a Quillen left homotopy on a cofibrant object into a right
/// homotopy through the given path object.
pub fn left_to_right(m: &ModelStructure, hm: &Homotopy, path: &PathObject) -> Result<RightHomotopy> {
    let c = &m.base;
    let x = hm.cyl.src;
    if !cofibrant_objects(m)?.contains(&x) {
        return Err(Error::Precondition(format!("{} is not cofibrant", c.object_name(x))));
    }
    if is_q_cylinder(m, &hm.cyl)?.is_none() {
        return Err(Error::Precondition(format!("{} is not a Quillen homotopy", hm.show(c))));
    }
    if path.y != c.cod(hm.f) {
        return Err(Error::Precondition("path object is for a different object".into()));
    }
    let bottom = pair_into(c, &path.product, c.compose(hm.f, hm.cyl.s), hm.h)
        .ok_or_else(|| Error::Math("no map (f s, h) into Y × Y".into()))?;
    let prob = LiftingProblem { f: hm.cyl.d0, g: path.pair, u: c.compose(path.sigma, hm.f), v: bottom };
    let kp = *solve_lifting(c, &prob)?
        .first()
        .ok_or_else(|| Error::Math("no diagonal for d0 against (delta0, delta1)".into()))?;
    let k = c.compose(kp, hm.cyl.d1);
    if c.compose(path.delta0, k) != hm.f || c.compose(path.delta1, k) != hm.g {
        return Err(Error::Math("right homotopy equations fail".into()));
    }
    Ok(RightHomotopy { path: path.clone(), k, f: hm.f, g: hm.g })
}

/// Objects reached as `W` by some cylinder (used to size searches).
pub fn cylinder_objects(cyls: &[Cylinder]) -> BTreeSet<Obj> {
    cyls.iter().map(|c| c.w).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn wh() -> (FinCat, MorSet) {
        let c = fixtures::walking_homotopy();
        let s = fixtures::wh_sigma(&c);
        (c, s)
    }

    fn m(c: &FinCat, n: &str) -> Mor {
        c.find_morphism(n).unwrap()
    }

    #[test]
    fn wh_cylinders_on_x() {
        let (c, sigma) = wh();
        let x = c.find_object("X").unwrap();
        let cyls = enumerate_cylinders(&c, &sigma, x, &Budget::unlimited()).unwrap();
        // identities on X, W, Y give x in hom(X, Z): 1 + 2 + 2; s gives 4 pairs.
        assert_eq!(cyls.len(), 9);
        assert!(cyls.contains(&Cylinder::identity(&c, x)));
        assert!(cyls.iter().any(|k| k.d0 == m(&c, "d0") && k.d1 == m(&c, "d1") && k.s == m(&c, "s")));
    }

    #[test]
    fn sigma_without_identity_is_rejected() {
        let (c, _) = wh();
        let only_s: MorSet = [m(&c, "s")].into();
        let x = c.find_object("X").unwrap();
        assert!(enumerate_cylinders(&c, &only_s, x, &Budget::unlimited()).is_err());
    }

    #[test]
    fn wh_only_homotopy_f_to_g() {
        let (c, sigma) = wh();
        let hs = enumerate_homotopies(&c, &sigma, m(&c, "f"), m(&c, "g"), &Budget::unlimited()).unwrap();
        assert_eq!(hs.len(), 1);
        let h = hs[0];
        assert_eq!((h.cyl.d0, h.cyl.d1, h.h), (m(&c, "d0"), m(&c, "d1"), m(&c, "h")));
        assert!(!h.is_trivial(&c));
        assert!(enumerate_homotopies(&c, &sigma, m(&c, "f"), m(&c, "s"), &Budget::unlimited()).is_err());
    }

    #[test]
    fn identity_homotopy_and_trivial_ones() {
        let (c, sigma) = wh();
        let f = m(&c, "f");
        let hs = enumerate_homotopies(&c, &sigma, f, f, &Budget::unlimited()).unwrap();
        assert!(hs.contains(&Homotopy::identity(&c, f)));
        assert!(hs.iter().all(|h| h.is_trivial(&c)));
        // (d0, d0; s, id) with h = fs is germ-linked from the X-degenerate presentation.
        let a = Homotopy::identity(&c, f);
        let b =
            Homotopy::new(&c, Cylinder::new(&c, m(&c, "d0"), m(&c, "d0"), m(&c, "s")).unwrap(), m(&c, "fs")).unwrap();
        assert!(germ_link(&c, &a, &b).is_some());
    }

    #[test]
    fn invert_and_whiskers() {
        let (c, sigma) = wh();
        let h = enumerate_homotopies(&c, &sigma, m(&c, "f"), m(&c, "g"), &Budget::unlimited()).unwrap()[0];
        let hi = invert(&h);
        assert_eq!((hi.f, hi.g), (h.g, h.f));
        assert!(hi.check(&c, &sigma).is_ok());
        assert_eq!(invert(&hi), h);
        let x = c.find_object("X").unwrap();
        assert_eq!(whisker_left(&c, &h, c.id(x)).unwrap(), h);
        let y = c.find_object("Y").unwrap();
        assert_eq!(whisker_right(&c, c.id(y), &h).unwrap(), h);
        // H s is a homotopy fs => gs over W.
        let hs = whisker_left(&c, &h, m(&c, "s")).unwrap();
        assert_eq!((hs.f, hs.g), (m(&c, "fs"), m(&c, "gs")));
        assert!(hs.check(&c, &sigma).is_ok());
        assert!(whisker_right(&c, m(&c, "s"), &h).is_err());
    }

    #[test]
    fn cylinder_morphism_identity() {
        let (c, sigma) = wh();
        let x = c.find_object("X").unwrap();
        for k in enumerate_cylinders(&c, &sigma, x, &Budget::unlimited()).unwrap() {
            let ms = cylinder_morphisms(&c, &k, &k);
            assert!(ms.contains(&CylMorphism { phi: c.id(k.w), psi: c.id(k.z) }));
        }
    }

    #[test]
    fn poset_cylinders_are_degenerate() {
        let c = fixtures::lattice_2x2();
        let all = c.all_morphisms();
        for x in c.objects() {
            for k in enumerate_cylinders(&c, &all, x, &Budget::unlimited()).unwrap() {
                assert!(k.is_degenerate());
            }
        }
        let a = m(&c, "a_top");
        let classes = germ_classes(&c, &all, a, a, &Budget::unlimited()).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn q_cylinders_on_trivial_structure() {
        let m = fixtures::trivial_2x2();
        let c = &m.base;
        for x in c.objects() {
            let k = Cylinder::identity(c, x);
            let cert = is_q_cylinder(&m, &k).unwrap().expect("identity cylinder is Quillen");
            assert!(cert.fibrant);
            assert!(lemma2_check(&m, &cert).unwrap().pass());
        }
    }

    #[test]
    fn missing_coproduct_is_an_error() {
        let (c, sigma) = wh();
        let x = c.find_object("X").unwrap();
        let mm = ModelStructure::new("wh", c.clone(), sigma.clone(), c.all_morphisms(), c.all_morphisms());
        assert!(is_q_cylinder(&mm, &Cylinder::identity(&c, x)).is_err());
    }

    #[test]
    fn normalization_on_valid_fixtures() {
        for mm in fixtures::valid_model_fixtures() {
            let c = &mm.base;
            let fc = crate::model::fc_objects(&mm).unwrap();
            for hm in all_homotopies(c, &mm.w, &Budget::unlimited()).unwrap() {
                if !fc.contains(&hm.cyl.src) || !fc.contains(&c.cod(hm.h)) {
                    continue;
                }
                let q = to_q_homotopy(&mm, &hm).unwrap();
                assert_eq!((q.output.f, q.output.g), (hm.f, hm.g));
                assert!(q.cert.fibrant);
            }
        }
    }

    #[test]
    fn glued_identities_stay_quillen() {
        for mm in fixtures::valid_model_fixtures() {
            let c = &mm.base;
            let cof = cofibrant_objects(&mm).unwrap();
            for f in c.morphisms().filter(|f| cof.contains(&c.dom(*f))) {
                let i = Homotopy::identity(c, f);
                if is_q_cylinder(&mm, &i.cyl).unwrap().is_none() {
                    continue;
                }
                let k = compose_vertical(&mm, &i, &i).unwrap();
                assert_eq!((k.f, k.g), (f, f));
            }
        }
    }

    #[test]
    fn path_objects_and_right_homotopies() {
        for mm in fixtures::valid_model_fixtures() {
            let c = &mm.base;
            let cof = cofibrant_objects(&mm).unwrap();
            for y in c.objects() {
                let paths = enumerate_path_objects(&mm, y).unwrap();
                for x in cof.iter().copied() {
                    for &f in c.hom(x, y) {
                        let i = Homotopy::identity(c, f);
                        if is_q_cylinder(&mm, &i.cyl).unwrap().is_none() {
                            continue;
                        }
                        for p in &paths {
                            let k = left_to_right(&mm, &i, p).unwrap();
                            assert_eq!(k.k, c.compose(p.sigma, f));
                        }
                    }
                }
            }
        }
    }
}
