use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mct_core::chain::{
    classify_map, factor_map, fibration_disk_criterion, run_oracle, trivial_fibration_pullback_criterion, ChainMap,
};
use mct_core::factor::{solve_lifting, squares};
use mct_core::fincat::validate_category;
use mct_core::fixtures;
use mct_core::format::{
    dot_category, dot_sset, dot_twocat, load_category, parse_category, parse_chain, parse_chain_map, parse_sset,
    parse_twocat, write_category, write_chain_map, write_model, write_sset, write_twocat, CatFile,
};
use mct_core::hocat::{
    build_ho, build_ho_sigma, build_q, compare_cells, default_probe_suite, default_replacements, localization_check,
    localization_targets, HoOptions, HoPresentation,
};
use mct_core::model::{check_determination, check_stability, validate_model};
use mct_core::simplicial::{
    boundary, ex, horn, is_kan_fibration_bounded, nerve, point, sd, standard_simplex, to_point, SSet,
};
use mct_core::twocat::{pi0, pi0_iso_counts, validate_twocat, Pi0, TwoCat};
use mct_core::{Budget, Error, FinCat, MorSet, Result};

use crate::{ChainCmd, Cmd, Global, HoCmd, HoInput, Report, SsetCmd};

pub fn run(cmd: Cmd, global: &Global, b: &Budget) -> Result<Report> {
    match cmd {
        Cmd::Validate { file } => validate(&file),
        Cmd::ModelCheck { file } => model_check(&file),
        Cmd::Lift { file, f, g } => lift(&file, &f, &g),
        Cmd::Ho(c) => ho(c, b),
        Cmd::Pi0 { file, check } => pi0_cmd(&file, check, b),
        Cmd::Chain(c) => chain(c, global.seed),
        Cmd::Sset(c) => sset(c, b),
        Cmd::Fixture { name } => fixture(&name),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn cat_json(c: &FinCat) -> Value {
    json!({
        "name": c.name(),
        "objects": c.objects().map(|o| c.object_name(o)).collect::<Vec<_>>(),
        "morphisms": c.morphisms().map(|f| json!({
            "name": c.mor_name(f),
            "dom": c.object_name(c.dom(f)),
            "cod": c.object_name(c.cod(f)),
        })).collect::<Vec<_>>(),
    })
}

fn plain(text: String, json: Value) -> Report {
    Report { ok: true, text, json, dot: None }
}

fn validate(file: &Path) -> Result<Report> {
    let cf = parse_category(&read(file)?)?;
    let c = &cf.cat;
    let v = validate_category(c);
    let mut text = format!("category {}: {} objects, {} morphisms\n", c.name(), c.objects().len(), c.morphisms().len());
    for (name, s) in &cf.classes {
        let _ = writeln!(text, "class {name}: {} morphisms", s.len());
    }
    if v.is_empty() {
        text.push_str("category axioms: ok\n");
    }
    for x in &v {
        let _ = writeln!(text, "violation: {x}");
    }
    let violations: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    Ok(Report {
        ok: v.is_empty(),
        text,
        json: json!({ "category": cat_json(c), "violations": violations }),
        dot: Some(dot_category(c)),
    })
}

fn model_check(file: &Path) -> Result<Report> {
    let cf = load_category(&read(file)?)?;
    let m = cf.model()?;
    let r = validate_model(&m);
    let mut text = String::new();
    for a in &r.axioms {
        match &a.witness {
            None => {
                let _ = writeln!(text, "{}: ok", a.axiom);
            }
            Some(w) => {
                let _ = writeln!(text, "{}: FAIL {w}", a.axiom);
            }
        }
    }
    let mut json = json!({ "model": m.name, "axioms": r });
    let mut ok = r.is_valid();
    if ok {
        let d = check_determination(&m);
        for e in &d.equalities {
            let status = if e.holds() {
                "ok".to_string()
            } else {
                format!("FAIL declared-only {:?} computed-only {:?}", e.only_declared, e.only_computed)
            };
            let _ = writeln!(text, "{}: {status}", e.statement);
        }
        let s = check_stability(&m);
        let _ = writeln!(text, "stability: {} squares, {} violations", s.squares_checked, s.violations.len());
        for v in &s.violations {
            let _ = writeln!(text, "  {} leg {} along {} gives {}", v.class, v.leg, v.along, v.result);
        }
        ok = d.holds() && s.violations.is_empty();
        json["determination"] = json!(d);
        json["stability"] = json!(s);
    }
    Ok(Report { ok, text, json, dot: Some(dot_category(&m.base)) })
}

fn mor(cf: &CatFile, name: &str) -> Result<usize> {
    cf.cat.find_morphism(name).ok_or_else(|| Error::Input(format!("no morphism {name}")))
}

fn lift(file: &Path, f: &str, g: &str) -> Result<Report> {
    let cf = load_category(&read(file)?)?;
    let c = &cf.cat;
    let (fi, gi) = (mor(&cf, f)?, mor(&cf, g)?);
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut obstruction = None;
    for sq in squares(c, fi, gi) {
        let lifts = solve_lifting(c, &sq)?;
        let names: Vec<&str> = lifts.iter().map(|&d| c.mor_name(d)).collect();
        let _ =
            writeln!(text, "square u = {}, v = {}: lifts [{}]", c.mor_name(sq.u), c.mor_name(sq.v), names.join(", "));
        if lifts.is_empty() && obstruction.is_none() {
            obstruction = Some((c.mor_name(sq.u).to_string(), c.mor_name(sq.v).to_string()));
        }
        rows.push(json!({ "u": c.mor_name(sq.u), "v": c.mor_name(sq.v), "lifts": names }));
    }
    match &obstruction {
        None => {
            let _ = writeln!(text, "{f} has the left lifting property against {g} ({} squares)", rows.len());
        }
        Some((u, v)) => {
            let _ = writeln!(text, "{f} does not lift against {g}: square u = {u}, v = {v} has no diagonal");
        }
    }
    Ok(Report {
        ok: obstruction.is_none(),
        text,
        json: json!({ "f": f, "g": g, "squares": rows, "lifts": obstruction.is_none() }),
        dot: None,
    })
}

/// The presentation together with the class it localizes at.
fn load_ho(input: &HoInput, b: &Budget) -> Result<(HoPresentation, MorSet, Option<mct_core::ModelStructure>)> {
    let cf = load_category(&read(&input.file)?)?;
    let opts = HoOptions { max_rounds: input.max_rounds as usize };
    match &input.sigma {
        Some(s) => {
            let sigma = cf.class(s)?;
            Ok((build_ho_sigma(&cf.cat, &sigma, &opts, b)?, sigma, None))
        }
        None => {
            let m = cf.model()?;
            let ho = build_ho(&m, &opts, b)?;
            let w = m.w.clone();
            Ok((ho, w, Some(m)))
        }
    }
}

fn summary(ho: &HoPresentation, text: &mut String) {
    let n2 = ho.two.as_ref().map_or(0, |t| t.n2());
    let _ = writeln!(
        text,
        "mode {:?}: {} objects, {} 1-cells, {} generators, {} 2-cells, {} after {} rounds",
        ho.mode,
        ho.objects.len(),
        ho.cells1.len(),
        ho.generators.len(),
        n2,
        if ho.closed { "closed" } else { "undecided" },
        ho.rounds
    );
}

fn ho(cmd: HoCmd, b: &Budget) -> Result<Report> {
    match cmd {
        HoCmd::Build { input, log, save } => {
            let (ho, _, _) = load_ho(&input, b)?;
            let mut text = String::new();
            summary(&ho, &mut text);
            let mut json = json!({ "mode": ho.mode, "closed": ho.closed, "rounds": ho.rounds });
            let mut dot = None;
            if let Some(t) = &ho.two {
                for (i, c) in t.cells2.iter().enumerate() {
                    let _ = writeln!(text, "{}: {}", c.name, ho.reprs[i]);
                }
                json["twocat"] = json!(t);
                dot = Some(dot_twocat(t));
                if let Some(path) = save {
                    std::fs::write(&path, write_twocat(t))
                        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
                }
            }
            if log {
                for l in &ho.log {
                    let _ = writeln!(text, "merge {l}");
                }
                json["log"] = json!(ho.log);
            }
            Ok(Report { ok: ho.closed, text, json, dot })
        }
        HoCmd::Cells { f, g, input } => {
            let (ho, _, _) = load_ho(&input, b)?;
            let c = &ho.base;
            let find = |n: &str| c.find_morphism(n).ok_or_else(|| Error::Input(format!("no morphism {n}")));
            let cells = ho.cells_between(find(&f)?, find(&g)?)?;
            let t = ho.two()?;
            let mut text = format!("{} class(es) of 2-cells {f} => {g}\n", cells.len());
            for &a in &cells {
                let _ = writeln!(text, "  {}: {}", t.cells2[a].name, ho.reprs[a]);
            }
            let suite = default_probe_suite(c, &ho.sigma, b)?;
            let mut pairs = Vec::new();
            for (i, &a) in cells.iter().enumerate() {
                for &z in &cells[i + 1..] {
                    let eq = compare_cells(&ho, &suite, a, z)?;
                    let _ = writeln!(text, "  {} vs {}: {eq}", t.cells2[a].name, t.cells2[z].name);
                    pairs.push(json!({ "a": t.cells2[a].name, "b": t.cells2[z].name, "relation": eq.to_string() }));
                }
            }
            let names: Vec<Value> =
                cells.iter().map(|&a| json!({ "name": t.cells2[a].name, "representative": ho.reprs[a] })).collect();
            Ok(plain(text, json!({ "f": f, "g": g, "cells": names, "comparisons": pairs })))
        }
        HoCmd::Pi0 { input } => {
            let (ho, _, _) = load_ho(&input, b)?;
            let t = ho.two()?;
            let p = pi0(t)?;
            let (text, json) = show_pi0(t, &p);
            Ok(Report { ok: true, text, json, dot: Some(dot_category(&p.cat)) })
        }
        HoCmd::CheckLocalization { input, target } => {
            let (ho, w, _) = load_ho(&input, b)?;
            let mut targets = localization_targets();
            if let Some(name) = &target {
                targets.retain(|x| x.name() == name);
                if targets.is_empty() {
                    let known: Vec<String> = localization_targets().iter().map(|x| x.name().to_string()).collect();
                    return Err(Error::Input(format!("unknown target {name}; known: {}", known.join(", "))));
                }
            }
            let mut text = String::new();
            let mut ok = true;
            let mut rows = Vec::new();
            for x in &targets {
                let r = localization_check(&ho, &w, x, b)?;
                ok &= r.pass();
                let _ = writeln!(text, "{}: {} functors, {} factor uniquely", r.target, r.functors, r.factored);
                for f in &r.failures {
                    let _ = writeln!(text, "  {f}");
                }
                rows.push(json!(r));
            }
            Ok(Report { ok, text, json: json!({ "targets": rows }), dot: None })
        }
        HoCmd::Q { input, show_equivalences } => {
            let (ho, _, m) = load_ho(&input, b)?;
            let m = m.ok_or_else(|| Error::Input("q needs a model structure; drop --sigma".into()))?;
            let repl = default_replacements(&m, b)?;
            let q = build_q(&m, &repl, &ho)?;
            let c = &m.base;
            let t = ho.two()?;
            let mut text = String::new();
            for x in c.objects() {
                let _ = writeln!(text, "q {} = {}", c.object_name(x), t.objects[q.functor.omap[x]]);
            }
            for f in c.morphisms() {
                let _ = writeln!(text, "q {} = {}", c.mor_name(f), t.cells1[q.functor.mmap[f]].name);
            }
            let mut eqs = Vec::new();
            if show_equivalences {
                for (w, e) in &q.equivalences {
                    let _ = writeln!(
                        text,
                        "q {} is an equivalence: inverse {}, unit {}, counit {}",
                        c.mor_name(*w),
                        t.cells1[e.inverse].name,
                        t.cells2[e.unit].name,
                        t.cells2[e.counit].name
                    );
                    eqs.push(json!({ "w": c.mor_name(*w), "witness": e }));
                }
            }
            Ok(plain(text, json!({ "functor": q.functor, "equivalences": eqs })))
        }
    }
}

fn show_pi0(t: &TwoCat, p: &Pi0) -> (String, Value) {
    let c = &p.cat;
    let mut text = format!("pi0: {} objects, {} morphisms\n", c.objects().len(), c.morphisms().len());
    let mut rows = Vec::new();
    for m in c.morphisms() {
        let members: Vec<&str> = p.members(m).iter().map(|&f| t.cells1[f].name.as_str()).collect();
        let _ = writeln!(
            text,
            "{} : {} -> {} = {{ {} }}",
            c.mor_name(m),
            c.object_name(c.dom(m)),
            c.object_name(c.cod(m)),
            members.join(", ")
        );
        rows.push(json!({ "class": c.mor_name(m), "members": members }));
    }
    (text, json!({ "category": cat_json(c), "classes": rows }))
}

fn pi0_cmd(file: &Path, check: bool, b: &Budget) -> Result<Report> {
    let t = parse_twocat(&read(file)?)?;
    let v = validate_twocat(&t);
    if !v.is_valid() {
        return Ok(Report { ok: false, text: v.to_string(), json: json!(v), dot: None });
    }
    let p = pi0(&t)?;
    let (mut text, mut json) = show_pi0(&t, &p);
    let mut ok = true;
    if check {
        let mut rows = Vec::new();
        for x in localization_targets() {
            let (below, above) = pi0_iso_counts(&t, &p, &x, b)?;
            ok &= below == above;
            let _ = writeln!(text, "functors into {}: {below} from pi0, {above} from T", x.name());
            rows.push(json!({ "target": x.name(), "from_pi0": below, "from_t": above }));
        }
        json["check"] = json!(rows);
    }
    Ok(Report { ok, text, json, dot: Some(dot_category(&p.cat)) })
}

fn chain(cmd: ChainCmd, seed: u64) -> Result<Report> {
    match cmd {
        ChainCmd::Homology { file } => {
            let c = parse_chain(&read(&file)?)?;
            let betti = c.betti();
            let mut text = format!("over F_{}, degrees 0..={}\n", c.p, c.top);
            for (k, h) in betti.iter().enumerate() {
                let _ = writeln!(text, "H_{k} = F_{}^{h}", c.p);
            }
            Ok(plain(text, json!({ "p": c.p, "top": c.top, "dims": c.dims, "homology": betti })))
        }
        ChainCmd::Classify { file } => {
            let f = parse_chain_map(&read(&file)?)?;
            let (text, json) = classify_text(&f);
            Ok(plain(text, json))
        }
        ChainCmd::Factor { file } => {
            let f = parse_chain_map(&read(&file)?)?;
            let fs = factor_map(&f)?;
            let mut text = String::new();
            let mut json = serde_json::Map::new();
            for (label, m) in [
                ("a.cofibration", &fs.a.0),
                ("a.trivial_fibration", &fs.a.1),
                ("b.trivial_cofibration", &fs.b.0),
                ("b.fibration", &fs.b.1),
            ] {
                let class = classify_map(m);
                let _ = writeln!(
                    text,
                    "## {label}: we={} fib={} cof={}",
                    class.weak_equivalence, class.fibration, class.cofibration
                );
                text.push_str(&write_chain_map(m));
                json.insert(label.into(), json!({ "class": class, "map": write_chain_map(m) }));
            }
            Ok(plain(text, Value::Object(json)))
        }
        ChainCmd::Oracle { samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = run_oracle(&mut rng, samples as usize)?;
            let mut text = format!(
                "{} samples: pullback criterion agrees {}, disk criterion agrees {}, factorizations recertified {}\n",
                r.samples, r.pullback_agree, r.disk_agree, r.factor_ok
            );
            let _ = writeln!(text, "{} trivial fibrations, {} fibrations", r.trivial_fibrations, r.fibrations);
            for f in &r.failures {
                let _ = writeln!(text, "failure: {f}");
            }
            Ok(Report { ok: r.pass(), text, json: json!(r), dot: None })
        }
    }
}

fn classify_text(f: &ChainMap) -> (String, Value) {
    let class = classify_map(f);
    let pb = trivial_fibration_pullback_criterion(f);
    let disk = fibration_disk_criterion(f, f.src.top);
    let mut text = String::new();
    let _ = writeln!(text, "weak equivalence: {}", class.weak_equivalence);
    if !class.homology_failures.is_empty() {
        let _ = writeln!(text, "  H_k not iso for k in {:?}", class.homology_failures);
    }
    let _ = writeln!(text, "fibration (onto in degrees >= 1): {}", class.fibration);
    let _ = writeln!(text, "cofibration (mono): {}", class.cofibration);
    let _ = writeln!(text, "epi in every degree: {}", class.epi);
    let _ = writeln!(text, "pullback criterion: {} ({})", pb.holds, pb.note);
    if let Some(n) = pb.failing_degree {
        let _ = writeln!(text, "  fails in degree {n}");
    }
    let _ = writeln!(text, "disk criterion: {}", disk.holds);
    if let Some((n, y)) = &disk.witness {
        let _ = writeln!(text, "  D^{n} -> N at {y:?} has no lift");
    }
    (text, json!({ "class": class, "pullback": pb, "disk": disk }))
}

/// A simplicial set file, or the nerve of a category file.
fn load_sset(file: &Path, trunc: usize) -> Result<SSet> {
    let text = read(file)?;
    let first = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty()).unwrap_or("");
    if first.starts_with("category") {
        Ok(nerve(&load_category(&text)?.cat, trunc))
    } else {
        parse_sset(&text)
    }
}

fn sset_report(x: &SSet) -> Report {
    let counts = x.counts();
    let text = format!("nondegenerate simplices by degree: {counts:?}\n{}", write_sset(x));
    Report { ok: true, text, json: json!({ "counts": counts, "sset": x }), dot: Some(dot_sset(x)) }
}

fn sset(cmd: SsetCmd, b: &Budget) -> Result<Report> {
    match cmd {
        SsetCmd::Nerve { file, trunc } => {
            let cf = load_category(&read(&file)?)?;
            Ok(sset_report(&nerve(&cf.cat, trunc)))
        }
        SsetCmd::Sd { file, trunc } => Ok(sset_report(&sd(&load_sset(&file, trunc)?))),
        SsetCmd::Ex { file, n, trunc, list } => {
            let x = load_sset(&file, trunc)?;
            let maps = ex(&x, n, b)?;
            let mut text = format!("|Ex({})_{n}| = {}\n", x.name, maps.len());
            let mut rows = Vec::new();
            if list {
                for (i, m) in maps.iter().enumerate() {
                    let shown: Vec<Vec<String>> =
                        m.images.iter().map(|d| d.iter().map(|s| x.show(s)).collect()).collect();
                    let _ = writeln!(text, "{i}: {shown:?}");
                    rows.push(shown);
                }
            }
            Ok(plain(text, json!({ "n": n, "count": maps.len(), "maps": rows })))
        }
        SsetCmd::Kan { file, nmax, trunc } => {
            let x = load_sset(&file, trunc.max(nmax))?;
            let r = is_kan_fibration_bounded(&x, &point(), &to_point(&x), nmax, b)?;
            let text = format!("{} -> Delta0, horns up to dimension {nmax}\n{r}", x.name);
            Ok(Report { ok: r.pass(), text, json: json!(r), dot: None })
        }
        SsetCmd::Check { file } => {
            let x = parse_sset(&read(&file)?)?;
            let r = x.check_identities(x.dim() + 1);
            let text = match &r {
                Ok(()) => format!("simplicial identities hold through degree {}\n", x.dim() + 1),
                Err(e) => format!("{e}\n"),
            };
            Ok(Report {
                ok: r.is_ok(),
                text,
                json: json!({ "counts": x.counts(), "error": r.err() }),
                dot: Some(dot_sset(&x)),
            })
        }
    }
}

fn parse_index(s: &str) -> Option<usize> {
    s.parse().ok()
}

fn fixture(name: &str) -> Result<Report> {
    let text = match name {
        "trivial_2x2" => write_model(&fixtures::trivial_2x2()),
        "lattice_all_w_cof" => write_model(&fixtures::lattice_all_w_cof()),
        "lattice_all_w_fib" => write_model(&fixtures::lattice_all_w_fib()),
        "chain2_mixed" => write_model(&fixtures::chain2_mixed()),
        "wh" => {
            let c = fixtures::walking_homotopy();
            let classes = BTreeMap::from([("Sigma".to_string(), fixtures::wh_sigma(&c))]);
            write_category(&c, &classes)
        }
        "chain3" => write_category(&fixtures::chain_example(), &BTreeMap::new()),
        "walking_iso" => write_category(&fixtures::walking_iso(), &BTreeMap::new()),
        _ => {
            if let Some(n) = name.strip_prefix("delta").and_then(parse_index) {
                write_sset(&standard_simplex(n))
            } else if let Some(n) = name.strip_prefix("boundary").and_then(parse_index) {
                write_sset(&boundary(n)?.0)
            } else if let Some((n, k)) = name.strip_prefix("horn").and_then(|s| s.split_once('_')) {
                match (parse_index(n), parse_index(k)) {
                    (Some(n), Some(k)) => write_sset(&horn(n, k)?.0),
                    _ => return Err(Error::Input(format!("unknown fixture {name}"))),
                }
            } else {
                return Err(Error::Input(format!(
                    "unknown fixture {name}; known: trivial_2x2, lattice_all_w_cof, lattice_all_w_fib, chain2_mixed, \
                     wh, chain3, walking_iso, delta<n>, boundary<n>, horn<n>_<k>"
                )));
            }
        }
    };
    Ok(plain(text.clone(), json!({ "name": name, "file": text })))
}
