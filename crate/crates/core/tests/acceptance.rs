//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mct_core::chain::run_oracle;
use mct_core::factor::{factor_through, solve_lifting, LiftingProblem};
use mct_core::fincat::{enumerate_functors, FinCat, MorSet};
use mct_core::fixtures::{self, chain, chain_example, trivial_2x2, valid_model_fixtures, walking_homotopy, wh_sigma};
use mct_core::hocat::{
    build_ho, build_ho_sigma, compute_fh_hat, default_probe_suite, extend_functor, extend_nat_transf, inclusion_probe,
    localization_check, localization_targets, probe_transformations, HoOptions, HoPresentation,
};
use mct_core::homotopy::{
    all_homotopies, enumerate_cylinders, enumerate_homotopies, enumerate_path_objects, invert, is_q_cylinder,
    left_to_right, lemma2_check, to_q_homotopy, Homotopy,
};
use mct_core::model::{check_determination, check_stability, cofibrant_objects, fc_objects, validate_model, Witness};
use mct_core::simplicial::{boundary, isomorphic, nerve, sd, sd_standard, standard_simplex};
use mct_core::twocat::{
    inverse_2cell, pi0, pi0_iso_counts, pi0_map, pi0_universal_check, validate_twocat, whisker_determination_check,
    TwoCat, TwoFunctor,
};
use mct_core::{Budget, ModelStructure};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:.2?}, limit {limit:?}"))
}

fn set(c: &FinCat, names: &[&str]) -> MorSet {
    names.iter().map(|n| c.find_morphism(n).unwrap()).collect()
}

/// Checks a witness against the structure it claims to refute.
fn witness_is_genuine(m: &ModelStructure, w: &Witness) -> bool {
    let c = &m.base;
    let mor = |n: &str| c.find_morphism(n);
    let class = |n: &str| match n {
        "W" => &m.w,
        "F" => &m.f,
        _ => &m.cof,
    };
    match w {
        Witness::MissingIdentity { class: k, morphism } => {
            mor(morphism).is_some_and(|f| c.is_identity(f) && !class(k).contains(&f))
        }
        Witness::NotClosedUnderComposition { class: k, g, f } => match (mor(g), mor(f)) {
            (Some(g), Some(f)) => {
                let s = class(k);
                s.contains(&g) && s.contains(&f) && !s.contains(&c.compose(g, f))
            }
            _ => false,
        },
        Witness::TwoOutOfThree { g, f, missing } => match (mor(g), mor(f), mor(missing)) {
            (Some(g), Some(f), Some(x)) => {
                let gf = c.compose(g, f);
                let ins = [g, f, gf].iter().filter(|a| m.w.contains(a)).count();
                ins == 2 && !m.w.contains(&x) && [g, f, gf].contains(&x)
            }
            _ => false,
        },
        Witness::NoFactorization { kind, morphism } => mor(morphism).is_some_and(|f| {
            let (af, acof) = (m.trivial_fibrations(), m.trivial_cofibrations());
            if kind.starts_with("(coF,") {
                factor_through(c, f, &m.cof, &af).is_none()
            } else {
                factor_through(c, f, &acof, &m.f).is_none()
            }
        }),
        Witness::Unliftable { left, right, top, bottom } => match (mor(left), mor(right), mor(top), mor(bottom)) {
            (Some(f), Some(g), Some(u), Some(v)) => {
                solve_lifting(c, &LiftingProblem { f, g, u, v }).is_ok_and(|d| d.is_empty())
            }
            _ => false,
        },
        _ => false,
    }
}

fn model_axiom_suite() -> Outcome {
    let start = Instant::now();
    let base = trivial_2x2();
    let r = validate_model(&base);
    ensure(r.is_valid(), || format!("trivial structure rejected: {}", r.summary()))?;
    let c = base.base.clone();
    let ids = c.identity_set();
    let with = |s: &MorSet, extra: &[&str]| -> MorSet { s.union(&set(&c, extra)).copied().collect() };
    let without = |s: &MorSet, gone: &[&str]| -> MorSet { s.difference(&set(&c, gone)).copied().collect() };
    let (w, f, cof) = (base.w.clone(), base.f.clone(), base.cof.clone());
    let all = c.all_morphisms();
    // (name, W, F, coF, failing axiom)
    let mutations: Vec<(&str, MorSet, MorSet, MorSet, &str)> = vec![
        ("drop id_bot from W", without(&w, &["id_bot"]), f.clone(), cof.clone(), "M3"),
        ("drop id_a from F", w.clone(), without(&f, &["id_a"]), cof.clone(), "M3"),
        ("drop id_top from coF", w.clone(), f.clone(), without(&cof, &["id_top"]), "M3"),
        ("remove bot_a from F", w.clone(), without(&f, &["bot_a"]), cof.clone(), "M4"),
        ("remove bot_a from coF", w.clone(), f.clone(), without(&cof, &["bot_a"]), "M4"),
        ("add bot_a to W", with(&w, &["bot_a"]), f.clone(), cof.clone(), "M2"),
        ("add bot_a, a_top to W", with(&w, &["bot_a", "a_top"]), f.clone(), cof.clone(), "M5"),
        ("F without the b side", w.clone(), with(&ids, &["bot_a", "a_top"]), cof.clone(), "M3"),
        ("coF without the a side", w.clone(), f.clone(), with(&ids, &["bot_b", "b_top"]), "M3"),
        ("W = all", all.clone(), f.clone(), cof.clone(), "M2"),
    ];
    for (name, w, f, cof, axiom) in mutations {
        let m = ModelStructure::new(name, c.clone(), w, f, cof);
        let r = validate_model(&m);
        let a = r.axiom(axiom);
        let wit = a.witness.as_ref().ok_or_else(|| format!("`{name}`: {axiom} not rejected ({})", r.summary()))?;
        ensure(witness_is_genuine(&m, wit), || format!("`{name}`: witness `{wit}` does not refute {axiom}"))?;
    }
    within(start, Duration::from_secs(1), "axiom suite")?;
    Ok(format!("10 mutations rejected with verified witnesses in {:.2?}", start.elapsed()))
}

fn determination() -> Outcome {
    let fx = valid_model_fixtures();
    for m in &fx {
        let start = Instant::now();
        let r = check_determination(m);
        ensure(r.holds(), || format!("{}: {:?}", m.name, r.equalities))?;
        within(start, Duration::from_secs(1), &m.name)?;
    }
    Ok(format!("{} fixtures", fx.len()))
}

fn stability() -> Outcome {
    let mut squares = 0;
    for m in valid_model_fixtures() {
        let r = check_stability(&m);
        ensure(r.violations.is_empty(), || format!("{}: {:?}", m.name, r.violations[0]))?;
        squares += r.squares_checked;
    }
    Ok(format!("{squares} squares, no violations"))
}

fn wh_ho() -> Result<HoPresentation, String> {
    let c = walking_homotopy();
    let s = wh_sigma(&c);
    build_ho_sigma(&c, &s, &HoOptions::default(), &Budget::default()).map_err(e2s)
}

fn wh_calculus() -> Outcome {
    let start = Instant::now();
    let ho = wh_ho()?;
    let c = &ho.base;
    let (f, g) = (c.find_morphism("f").unwrap(), c.find_morphism("g").unwrap());
    let hs = enumerate_homotopies(c, &ho.sigma, f, g, &Budget::default()).map_err(e2s)?;
    ensure(!hs.is_empty(), || "no homotopy f => g".into())?;
    ensure(ho.closed, || format!("saturation not closed after {} rounds", ho.rounds))?;
    let t = ho.two().map_err(e2s)?;
    let v = validate_twocat(t);
    ensure(v.is_valid(), || v.to_string())?;
    let wd = whisker_determination_check(t);
    ensure(wd.is_valid(), || wd.to_string())?;
    for a in 0..t.n2() {
        ensure(inverse_2cell(t, a).is_some(), || format!("{} has no inverse", t.cells2[a].name))?;
    }
    for h in &hs {
        let a = ho.cell_of(h).ok_or("homotopy without a class")?;
        let b = ho.cell_of(&invert(h)).ok_or("inverse without a class")?;
        let fi = ho.cell1_of(h.f).unwrap();
        let gi = ho.cell1_of(h.g).unwrap();
        ensure(t.v(b, a) == Some(t.id2[fi]), || "[H^-1] . [H] != [I_f]".into())?;
        ensure(t.v(a, b) == Some(t.id2[gi]), || "[H] . [H^-1] != [I_g]".into())?;
        ensure(ho.cell_of(&Homotopy::identity(c, h.f)) == Some(t.id2[fi]), || "I_f is not the identity".into())?;
    }
    within(start, Duration::from_secs(5), "WH calculus")?;
    Ok(format!("{} 2-cells, {} rounds, {:.2?}", t.n2(), ho.rounds, start.elapsed()))
}

/// WH in Sigma-mode plus every valid model fixture.
fn presentations() -> Result<Vec<(String, HoPresentation, Option<ModelStructure>)>, String> {
    let mut out = vec![("WH".to_string(), wh_ho()?, None)];
    for m in valid_model_fixtures() {
        let ho = build_ho(&m, &HoOptions::default(), &Budget::default()).map_err(e2s)?;
        out.push((m.name.clone(), ho, Some(m)));
    }
    Ok(out)
}

fn probe_soundness() -> Outcome {
    let b = Budget::default();
    let mut probes = 0;
    for (name, ho, _) in presentations()? {
        let suite = default_probe_suite(&ho.base, &ho.sigma, &b).map_err(e2s)?;
        for p in &suite.probes {
            extend_functor(&ho, suite.target(p), p).map_err(|e| format!("{name}, probe {}: {e}", p.name))?;
            probes += 1;
        }
        if ho.objects.len() == ho.base.num_objects() {
            let (t, p) = inclusion_probe(&ho).map_err(e2s)?;
            extend_functor(&ho, &t, &p).map_err(|e| format!("{name}, inclusion: {e}"))?;
        }
    }
    Ok(format!("{probes} probe extensions well defined"))
}

fn localization() -> Outcome {
    let b = Budget::default();
    let targets = localization_targets();
    let mut functors = 0;
    let mut slowest = Duration::ZERO;
    for (name, ho, m) in presentations()? {
        let start = Instant::now();
        let w = m.as_ref().map_or(ho.sigma.clone(), |m| m.w.clone());
        for x in &targets {
            let r = localization_check(&ho, &w, x, &b).map_err(e2s)?;
            ensure(r.pass(), || format!("{name} -> {}: {:?}", x.name(), r.failures))?;
            functors += r.functors;
        }
        within(start, Duration::from_secs(60), &name)?;
        slowest = slowest.max(start.elapsed());
    }
    Ok(format!("{} targets, {functors} functors factor uniquely, slowest fixture {slowest:.2?}", targets.len()))
}

/// Probes paired with each probe, and transformations checked per pair.
const PARTNERS: usize = 8;
const TRANSFORMATIONS_PER_PAIR: usize = 40;

fn lemma_regressions() -> Outcome {
    let b = Budget::default();
    let (mut l2, mut qn, mut lr, mut cl) = (0, 0, 0, 0);
    for (name, ho, m) in presentations()? {
        let suite = default_probe_suite(&ho.base, &ho.sigma, &b).map_err(e2s)?;
        if let Some(m) = &m {
            let c = &m.base;
            let cof = cofibrant_objects(m).map_err(e2s)?;
            for &x in &cof {
                for k in enumerate_cylinders(c, &m.w, x, &b).map_err(e2s)? {
                    if let Some(cert) = is_q_cylinder(m, &k).map_err(e2s)? {
                        let r = lemma2_check(m, &cert).map_err(e2s)?;
                        ensure(r.pass(), || format!("{name}: lemma 2 fails on {}", k.show(c)))?;
                        l2 += 1;
                    }
                }
            }
            let fc = fc_objects(m).map_err(e2s)?;
            for hm in all_homotopies(c, &m.w, &b).map_err(e2s)? {
                if !fc.contains(&hm.cyl.src) || !fc.contains(&c.cod(hm.h)) {
                    continue;
                }
                let q = to_q_homotopy(m, &hm).map_err(|e| format!("{name}: {e}"))?;
                for p in &suite.probes {
                    let t = suite.target(p);
                    let a = compute_fh_hat(t, p, &q.input).map_err(e2s)?;
                    let z = compute_fh_hat(t, p, &q.output).map_err(e2s)?;
                    ensure(a == z, || format!("{name}: q-normalization changes the image under {}", p.name))?;
                }
                qn += 1;
                if !cof.contains(&hm.cyl.src) || is_q_cylinder(m, &hm.cyl).map_err(e2s)?.is_none() {
                    continue;
                }
                for path in enumerate_path_objects(m, c.cod(hm.f)).map_err(e2s)? {
                    let k = left_to_right(m, &hm, &path).map_err(|e| format!("{name}: {e}"))?;
                    ensure(c.compose(path.delta0, k.k) == hm.f && c.compose(path.delta1, k.k) == hm.g, || {
                        format!("{name}: right homotopy has the wrong ends")
                    })?;
                    lr += 1;
                }
            }
        }
        for (i, pf) in suite.probes.iter().enumerate() {
            let same: Vec<_> = suite.probes.iter().filter(|q| q.target == pf.target).collect();
            // pf itself plus a spread of partners over the same target
            let stride = same.len().div_ceil(PARTNERS).max(1);
            let partners = std::iter::once(pf).chain(same.iter().copied().skip(i % stride).step_by(stride));
            for pg in partners {
                let t = suite.target(pf);
                let thetas = probe_transformations(&ho.base, t, pf, pg, &b).map_err(e2s)?;
                for theta in thetas.iter().take(TRANSFORMATIONS_PER_PAIR) {
                    let r = extend_nat_transf(&ho, t, pf, pg, theta).map_err(e2s)?;
                    ensure(r.pass(), || format!("{name}: {r:?}"))?;
                    cl += 1;
                }
            }
        }
    }
    ensure(l2 > 0 && qn > 0 && lr > 0 && cl > 0, || format!("vacuous run: {l2} {qn} {lr} {cl}"))?;
    Ok(format!("lemma2 {l2}, q-normalization {qn}, left-to-right {lr}, 2-naturality {cl}"))
}

fn nerve_golden() -> Outcome {
    let d2 = standard_simplex(2);
    for (what, n) in [("N([2])", nerve(&chain(2), 3)), ("N(x->y->z)", nerve(&chain_example(), 3))] {
        n.check_identities(3).map_err(|e| format!("{what}: {e}"))?;
        let iso = isomorphic(&n, &d2).ok_or_else(|| format!("{what} is not Delta2"))?;
        // Vertices in order, so the iso is the canonical one.
        ensure(iso.images[0].iter().enumerate().all(|(i, s)| s.nd == i), || format!("{what}: vertex order differs"))?;
        for k in 0..=3 {
            let mine: Vec<_> = n.simplices(k).iter().map(|x| iso.apply(&d2, x)).collect();
            let theirs = d2.simplices(k);
            let mut a = mine.clone();
            a.sort();
            a.dedup();
            ensure(a.len() == mine.len() && a.len() == theirs.len(), || format!("{what}: degree {k} differs"))?;
        }
    }
    ensure(nerve(&fixtures::terminal(), 4).counts() == vec![1], || "N(1) != Delta0".into())?;
    Ok("N([2]) and the chain example equal Delta2 through degree 3".into())
}

fn subdivision() -> Outcome {
    let s2 = sd_standard(2);
    ensure(s2.counts() == vec![7, 12, 6], || format!("SdDelta2 counts {:?}", s2.counts()))?;
    let mut names: Vec<&str> = s2.nd[0].iter().map(|v| v.name.as_str()).collect();
    names.sort();
    let mut figure = vec!["{0}", "{1}", "{2}", "{0,1}", "{1,2}", "{0,2}", "{0,1,2}"];
    figure.sort();
    ensure(names == figure, || format!("vertex set {names:?}"))?;
    for n in 0..=4 {
        let v = sd_standard(n).count(0);
        ensure(v == (1 << (n + 1)) - 1, || format!("SdDelta{n} has {v} vertices"))?;
    }
    ensure(isomorphic(&sd(&standard_simplex(2)), &s2).is_some(), || "glued Sd(Delta2) differs".into())?;
    let (b, _) = boundary(2).map_err(e2s)?;
    ensure(sd(&b).counts() == vec![6, 6], || "Sd(dDelta2) is not a hexagon".into())?;
    Ok("7/12/6, figure vertex set, 2^(n+1)-1 for n <= 4".into())
}

fn chain_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let r = run_oracle(&mut rng, 1000).map_err(e2s)?;
    ensure(r.pass(), || format!("{:?}", &r.failures[..r.failures.len().min(3)]))?;
    within(start, Duration::from_secs(30), "oracle")?;
    Ok(format!(
        "{} samples ({} trivial fibrations, {} fibrations), all agree, {:.2?}",
        r.samples,
        r.trivial_fibrations,
        r.fibrations,
        start.elapsed()
    ))
}

fn pi0_adjunction() -> Outcome {
    let b = Budget::default();
    let targets = localization_targets();
    let (mut checks, mut composites) = (0, 0);
    for (name, ho, _) in presentations()? {
        let t = ho.two().map_err(e2s)?;
        let p = pi0(t).map_err(e2s)?;
        let u = t.underlying().map_err(e2s)?;
        for x in &targets {
            let (below, above) = pi0_iso_counts(t, &p, x, &b).map_err(e2s)?;
            ensure(below == above, || format!("{name} -> {}: {below} vs {above}", x.name()))?;
            for f in enumerate_functors(&u, x, &b).map_err(e2s)? {
                let Some(tf) = TwoFunctor::into_discrete(t, f.omap, f.mmap) else { continue };
                let r = pi0_universal_check(t, &p, x, &tf, &b).map_err(e2s)?;
                ensure(r.pass(), || format!("{name} -> {}: {:?}", x.name(), r.note))?;
                checks += 1;
            }
        }
        // pi0(G . F) = pi0(G) . pi0(F) for probe extensions F followed by
        // the quotient of their target.
        let suite = default_probe_suite(&ho.base, &ho.sigma, &b).map_err(e2s)?;
        for pr in &suite.probes {
            let tt = suite.target(pr);
            let ext = extend_functor(&ho, tt, pr).map_err(e2s)?;
            let pt = pi0(tt).map_err(e2s)?;
            let quotient = TwoCat::discrete(&pt.cat);
            let g = TwoFunctor::into_discrete(tt, (0..tt.objects.len()).collect(), pt.class_of.clone())
                .ok_or("quotient separates a 2-cell")?;
            let pq = pi0(&quotient).map_err(e2s)?;
            let lhs = pi0_map(&p, &pq, &g.after(&ext.functor));
            let rhs = pi0_map(&pt, &pq, &g).after(&pi0_map(&p, &pt, &ext.functor));
            ensure(lhs == rhs, || format!("{name}: pi0 not functorial on {}", pr.name))?;
            composites += 1;
        }
    }
    Ok(format!("{checks} universal checks, {composites} composites"))
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("model-axiom suite", model_axiom_suite),
        ("determination", determination),
        ("stability", stability),
        ("WH homotopy calculus", wh_calculus),
        ("probe soundness", probe_soundness),
        ("localization universal property", localization),
        ("lemma regressions", lemma_regressions),
        ("nerve golden tests", nerve_golden),
        ("subdivision counts", subdivision),
        ("chain-complex oracle", chain_oracle),
        ("pi0 adjunction", pi0_adjunction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match out {
            Ok(detail) => println!("PASS {:>2} {name} [{t:.2?}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{t:.2?}]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
