//! Model structures on finite categories: axioms M1-M5, determination,
//! stability, (co)fibrant objects and duality.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{factor_through, is_retract, lifting_obstruction, LiftingTable};
use crate::fincat::{
    colimit, cospan_diagram, discrete_diagram, initial, limit, parallel_diagram, pullback, pushout, span_diagram,
    terminal, unique_arrow, validate_category, Diagram, FinCat, Mor, MorSet, Obj,
};

/// Validation state of a [`ModelStructure`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Validation {
    Unchecked,
    Valid,
    Invalid(String),
}

/// A finite category with classes `W`, `F`, `coF`.
#[derive(Clone, Debug)]
pub struct ModelStructure {
    pub name: String,
    pub base: FinCat,
    pub w: MorSet,
    pub f: MorSet,
    pub cof: MorSet,
    pub validated: Validation,
}

impl ModelStructure {
    pub fn new(name: impl Into<String>, base: FinCat, w: MorSet, f: MorSet, cof: MorSet) -> Self {
        ModelStructure { name: name.into(), base, w, f, cof, validated: Validation::Unchecked }
    }

    /// Runs [`validate_model`] and records the verdict.
    pub fn validate(&mut self) -> ModelReport {
        let rep = validate_model(self);
        self.validated = if rep.is_valid() { Validation::Valid } else { Validation::Invalid(rep.summary()) };
        rep
    }

    pub fn trivial_fibrations(&self) -> MorSet {
        self.f.intersection(&self.w).copied().collect()
    }

    pub fn trivial_cofibrations(&self) -> MorSet {
        self.cof.intersection(&self.w).copied().collect()
    }
}

/// `(F ∩ W, coF ∩ W)`.
pub fn trivial_classes(m: &ModelStructure) -> (MorSet, MorSet) {
    (m.trivial_fibrations(), m.trivial_cofibrations())
}

/// Failure evidence for one axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// A diagram (shape name and object images) without a limit or colimit.
    MissingLimit {
        shape: String,
        objects: Vec<String>,
        arrows: Vec<String>,
        colimit: bool,
    },
    /// A square `(i, p, u, v)` with `i` on the left and no diagonal.
    Unliftable {
        left: String,
        right: String,
        top: String,
        bottom: String,
    },
    MissingIdentity {
        class: String,
        morphism: String,
    },
    NotClosedUnderComposition {
        class: String,
        g: String,
        f: String,
    },
    NotClosedUnderRetracts {
        class: String,
        retract: String,
        of: String,
    },
    NoFactorization {
        kind: String,
        morphism: String,
    },
    TwoOutOfThree {
        g: String,
        f: String,
        missing: String,
    },
    Category(String),
}

impl fmt::Display for Witness {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::MissingLimit { shape, objects, arrows, colimit } => write!(
                fm,
                "no {} for {} diagram objects [{}] arrows [{}]",
                if *colimit { "colimit" } else { "limit" },
                shape,
                objects.join(", "),
                arrows.join(", ")
            ),
            Witness::Unliftable { left, right, top, bottom } => {
                write!(fm, "square {left} / {right} with top {top}, bottom {bottom} has no lift")
            }
            Witness::MissingIdentity { class, morphism } => write!(fm, "{class} lacks identity {morphism}"),
            Witness::NotClosedUnderComposition { class, g, f } => {
                write!(fm, "{class} contains {g} and {f} but not {g} . {f}")
            }
            Witness::NotClosedUnderRetracts { class, retract, of } => {
                write!(fm, "{retract} is a retract of {of} in {class} but not in {class}")
            }
            Witness::NoFactorization { kind, morphism } => write!(fm, "{morphism} has no factorization {kind}"),
            Witness::TwoOutOfThree { g, f, missing } => {
                write!(fm, "2-out-of-3 fails on {g} . {f}: {missing} not in W")
            }
            Witness::Category(s) => write!(fm, "base category invalid: {s}"),
        }
    }
}

/// Pass/fail of one axiom with its first witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub pass: bool,
    pub witness: Option<Witness>,
}

impl AxiomResult {
    fn from(axiom: &str, witness: Option<Witness>) -> Self {
        AxiomResult { axiom: axiom.into(), pass: witness.is_none(), witness }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub name: String,
    pub axioms: Vec<AxiomResult>,
}

impl ModelReport {
    pub fn is_valid(&self) -> bool {
        self.axioms.iter().all(|a| a.pass)
    }

    pub fn axiom(&self, name: &str) -> &AxiomResult {
        self.axioms.iter().find(|a| a.axiom == name).expect("known axiom")
    }

    /// Everything except M1 passes.
    pub fn passes_except_m1(&self) -> bool {
        self.axioms.iter().filter(|a| a.axiom != "M1").all(|a| a.pass)
    }

    pub fn summary(&self) -> String {
        self.axioms
            .iter()
            .filter_map(|a| a.witness.as_ref().map(|w| format!("{}: {}", a.axiom, w)))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// All diagrams of the M1 family, in a fixed order: empty, single arrow,
/// parallel pair, span, cospan, discrete pair.
pub fn m1_diagrams(c: &FinCat) -> Vec<(&'static str, Diagram)> {
    let mut out = vec![("empty", discrete_diagram(c, &[]))];
    for f in c.morphisms() {
        let shape = crate::fincat::shapes::arrow();
        let functor =
            crate::fincat::FinFunctor { omap: vec![c.dom(f), c.cod(f)], mmap: vec![c.id(c.dom(f)), c.id(c.cod(f)), f] };
        out.push(("arrow", Diagram::new(shape, functor)));
    }
    for f in c.morphisms() {
        for g in c.morphisms() {
            if c.parallel(f, g) {
                out.push(("parallel", parallel_diagram(c, f, g)));
            }
        }
    }
    for f in c.morphisms() {
        for g in c.morphisms() {
            if c.dom(f) == c.dom(g) {
                out.push(("span", span_diagram(c, f, g)));
            }
        }
    }
    for f in c.morphisms() {
        for g in c.morphisms() {
            if c.cod(f) == c.cod(g) {
                out.push(("cospan", cospan_diagram(c, f, g)));
            }
        }
    }
    for a in c.objects() {
        for b in c.objects() {
            out.push(("discrete", discrete_diagram(c, &[a, b])));
        }
    }
    out
}

fn describe(c: &FinCat, shape: &str, d: &Diagram, colimit: bool) -> Witness {
    Witness::MissingLimit {
        shape: shape.into(),
        objects: d.functor.omap.iter().map(|&o| c.object_name(o).to_string()).collect(),
        arrows: d
            .shape
            .morphisms()
            .filter(|&u| !d.shape.is_identity(u))
            .map(|u| c.mor_name(d.functor.mmap[u]).to_string())
            .collect(),
        colimit,
    }
}

/// First diagram of the M1 family lacking a limit or colimit.
pub fn check_m1(c: &FinCat) -> Option<Witness> {
    for (shape, d) in m1_diagrams(c) {
        if limit(c, &d).is_none() {
            return Some(describe(c, shape, &d, false));
        }
        if colimit(c, &d).is_none() {
            return Some(describe(c, shape, &d, true));
        }
    }
    None
}

fn check_m2(m: &ModelStructure) -> Option<Witness> {
    let c = &m.base;
    let sq = |i: Mor, p: Mor| {
        lifting_obstruction(c, i, p).map(|s| Witness::Unliftable {
            left: c.mor_name(s.f).into(),
            right: c.mor_name(s.g).into(),
            top: c.mor_name(s.u).into(),
            bottom: c.mor_name(s.v).into(),
        })
    };
    let acof = m.trivial_cofibrations();
    let af = m.trivial_fibrations();
    for &i in &acof {
        for &p in &m.f {
            if let Some(w) = sq(i, p) {
                return Some(w);
            }
        }
    }
    for &i in &m.cof {
        for &p in &af {
            if let Some(w) = sq(i, p) {
                return Some(w);
            }
        }
    }
    None
}

fn class_closure_witness(c: &FinCat, name: &str, class: &MorSet) -> Option<Witness> {
    for o in c.objects() {
        if !class.contains(&c.id(o)) {
            return Some(Witness::MissingIdentity { class: name.into(), morphism: c.mor_name(c.id(o)).into() });
        }
    }
    for &g in class {
        for &f in class {
            if c.dom(g) == c.cod(f) && !class.contains(&c.compose(g, f)) {
                return Some(Witness::NotClosedUnderComposition {
                    class: name.into(),
                    g: c.mor_name(g).into(),
                    f: c.mor_name(f).into(),
                });
            }
        }
    }
    for f in c.morphisms() {
        if class.contains(&f) {
            continue;
        }
        for &g in class {
            if is_retract(c, f, g).is_some() {
                return Some(Witness::NotClosedUnderRetracts {
                    class: name.into(),
                    retract: c.mor_name(f).into(),
                    of: c.mor_name(g).into(),
                });
            }
        }
    }
    None
}

fn check_m3(m: &ModelStructure) -> Option<Witness> {
    class_closure_witness(&m.base, "W", &m.w)
        .or_else(|| class_closure_witness(&m.base, "F", &m.f))
        .or_else(|| class_closure_witness(&m.base, "COF", &m.cof))
}

fn check_m4(m: &ModelStructure) -> Option<Witness> {
    let c = &m.base;
    let (af, acof) = trivial_classes(m);
    for f in c.morphisms() {
        if factor_through(c, f, &m.cof, &af).is_none() {
            return Some(Witness::NoFactorization { kind: "(coF, F∩W)".into(), morphism: c.mor_name(f).into() });
        }
        if factor_through(c, f, &acof, &m.f).is_none() {
            return Some(Witness::NoFactorization { kind: "(coF∩W, F)".into(), morphism: c.mor_name(f).into() });
        }
    }
    None
}

fn check_m5(m: &ModelStructure) -> Option<Witness> {
    let c = &m.base;
    for g in c.morphisms() {
        for f in c.morphisms() {
            if c.dom(g) != c.cod(f) {
                continue;
            }
            let gf = c.compose(g, f);
            let (a, b, k) = (m.w.contains(&f), m.w.contains(&g), m.w.contains(&gf));
            let missing = match (a, b, k) {
                (true, true, false) => Some(gf),
                (true, false, true) => Some(g),
                (false, true, true) => Some(f),
                _ => None,
            };
            if let Some(x) = missing {
                return Some(Witness::TwoOutOfThree {
                    g: c.mor_name(g).into(),
                    f: c.mor_name(f).into(),
                    missing: c.mor_name(x).into(),
                });
            }
        }
    }
    None
}

/// Axiom-by-axiom report; witnesses are the first in lexicographic order.
pub fn validate_model(m: &ModelStructure) -> ModelReport {
    let cat_errors = validate_category(&m.base);
    if let Some(e) = cat_errors.first() {
        let w = Some(Witness::Category(e.to_string()));
        return ModelReport {
            name: m.name.clone(),
            axioms: ["M1", "M2", "M3", "M4", "M5"].iter().map(|a| AxiomResult::from(a, w.clone())).collect(),
        };
    }
    ModelReport {
        name: m.name.clone(),
        axioms: vec![
            AxiomResult::from("M1", check_m1(&m.base)),
            AxiomResult::from("M2", check_m2(m)),
            AxiomResult::from("M3", check_m3(m)),
            AxiomResult::from("M4", check_m4(m)),
            AxiomResult::from("M5", check_m5(m)),
        ],
    }
}

/// One of the four determination equalities with its set differences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equality {
    pub statement: String,
    /// In the declared class but not in the computed one.
    pub only_declared: Vec<String>,
    /// Computed but not declared.
    pub only_computed: Vec<String>,
}

impl Equality {
    pub fn holds(&self) -> bool {
        self.only_declared.is_empty() && self.only_computed.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterminationReport {
    pub equalities: Vec<Equality>,
}

impl DeterminationReport {
    pub fn holds(&self) -> bool {
        self.equalities.iter().all(|e| e.holds())
    }
}

fn equality(c: &FinCat, statement: &str, declared: &MorSet, computed: &MorSet) -> Equality {
    Equality {
        statement: statement.into(),
        only_declared: c.names(&declared.difference(computed).copied().collect()),
        only_computed: c.names(&computed.difference(declared).copied().collect()),
    }
}

/// `coF = llp(F∩W)`, `coF∩W = llp(F)`, `F = rlp(coF∩W)`, `F∩W = rlp(coF)`.
pub fn check_determination(m: &ModelStructure) -> DeterminationReport {
    let c = &m.base;
    let t = LiftingTable::new(c);
    let (af, acof) = trivial_classes(m);
    DeterminationReport {
        equalities: vec![
            equality(c, "coF = llp(F∩W)", &m.cof, &t.llp(&af)),
            equality(c, "coF∩W = llp(F)", &acof, &t.llp(&m.f)),
            equality(c, "F = rlp(coF∩W)", &m.f, &t.rlp(&acof)),
            equality(c, "F∩W = rlp(coF)", &af, &t.rlp(&m.cof)),
        ],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityViolation {
    pub class: String,
    pub leg: String,
    pub along: String,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub squares_checked: usize,
    pub violations: Vec<StabilityViolation>,
}

/// Pushouts of coF and coF∩W, pullbacks of F and F∩W, over every span and
/// cospan whose (co)limit exists.
pub fn check_stability(m: &ModelStructure) -> StabilityReport {
    let c = &m.base;
    let (af, acof) = trivial_classes(m);
    let mut rep = StabilityReport { squares_checked: 0, violations: vec![] };
    let classes_po: [(&str, &MorSet); 2] = [("coF", &m.cof), ("coF∩W", &acof)];
    for (name, class) in classes_po {
        for &i in class {
            for g in c.morphisms() {
                if c.dom(g) != c.dom(i) {
                    continue;
                }
                // Pushout of i along g: the leg opposite i is out of cod g.
                if let Ok(Some(sq)) = pushout(c, g, i) {
                    rep.squares_checked += 1;
                    if !class.contains(&sq.p1) {
                        rep.violations.push(StabilityViolation {
                            class: name.into(),
                            leg: c.mor_name(i).into(),
                            along: c.mor_name(g).into(),
                            result: c.mor_name(sq.p1).into(),
                        });
                    }
                }
            }
        }
    }
    let classes_pb: [(&str, &MorSet); 2] = [("F", &m.f), ("F∩W", &af)];
    for (name, class) in classes_pb {
        for &p in class {
            for g in c.morphisms() {
                if c.cod(g) != c.cod(p) {
                    continue;
                }
                // Pullback of p along g: the leg opposite p is into dom g.
                if let Ok(Some(sq)) = pullback(c, g, p) {
                    rep.squares_checked += 1;
                    if !class.contains(&sq.p1) {
                        rep.violations.push(StabilityViolation {
                            class: name.into(),
                            leg: c.mor_name(p).into(),
                            along: c.mor_name(g).into(),
                            result: c.mor_name(sq.p1).into(),
                        });
                    }
                }
            }
        }
    }
    rep
}

/// Objects whose map to the terminal object is a fibration.
pub fn fibrant_objects(m: &ModelStructure) -> Result<BTreeSet<Obj>> {
    let c = &m.base;
    let t = terminal(c).ok_or_else(|| Error::Precondition("no terminal object".into()))?;
    Ok(c.objects().filter(|&o| unique_arrow(c, o, t).is_some_and(|p| m.f.contains(&p))).collect())
}

/// Objects whose map from the initial object is a cofibration.
pub fn cofibrant_objects(m: &ModelStructure) -> Result<BTreeSet<Obj>> {
    let c = &m.base;
    let z = initial(c).ok_or_else(|| Error::Precondition("no initial object".into()))?;
    Ok(c.objects().filter(|&o| unique_arrow(c, z, o).is_some_and(|i| m.cof.contains(&i))).collect())
}

/// Fibrant-cofibrant objects.
pub fn fc_objects(m: &ModelStructure) -> Result<BTreeSet<Obj>> {
    let f = fibrant_objects(m)?;
    let cf = cofibrant_objects(m)?;
    Ok(f.intersection(&cf).copied().collect())
}

/// Opposite base, `F` and `coF` exchanged, `W` kept.
pub fn dual_model(m: &ModelStructure) -> ModelStructure {
    let name = match m.name.strip_suffix("^op") {
        Some(b) => b.to_string(),
        None => format!("{}^op", m.name),
    };
    ModelStructure::new(name, m.base.opposite(), m.w.clone(), m.cof.clone(), m.f.clone())
}

/// `{f | f = p i, i ∈ coF∩W, p ∈ F∩W}`.
pub fn w_from_factorizations(m: &ModelStructure) -> MorSet {
    let (af, acof) = trivial_classes(m);
    m.base.morphisms().filter(|&f| factor_through(&m.base, f, &acof, &af).is_some()).collect()
}
