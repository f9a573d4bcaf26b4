use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mct_core::chain::run_oracle;
use mct_core::fixtures;
use mct_core::hocat::{build_ho, build_ho_sigma, localization_check, localization_targets, HoOptions};
use mct_core::model::{check_determination, check_stability, validate_model};
use mct_core::simplicial::{boundary, ex, nerve, sd, sd_standard, standard_simplex};
use mct_core::Budget;

fn model(c: &mut Criterion) {
    let m = fixtures::trivial_2x2();
    c.bench_function("validate_model/trivial_2x2", |b| b.iter(|| validate_model(black_box(&m))));
    c.bench_function("determination/trivial_2x2", |b| b.iter(|| check_determination(black_box(&m))));
    c.bench_function("stability/trivial_2x2", |b| b.iter(|| check_stability(black_box(&m))));
}

fn ho(c: &mut Criterion) {
    let budget = Budget::default();
    let wh = fixtures::walking_homotopy();
    let sigma = fixtures::wh_sigma(&wh);
    c.bench_function("build_ho_sigma/WH", |b| {
        b.iter(|| build_ho_sigma(black_box(&wh), &sigma, &HoOptions::default(), &budget).unwrap())
    });
    let m = fixtures::trivial_2x2();
    c.bench_function("build_ho/trivial_2x2", |b| {
        b.iter(|| build_ho(black_box(&m), &HoOptions::default(), &budget).unwrap())
    });
    let ho = build_ho(&m, &HoOptions::default(), &budget).unwrap();
    let targets = localization_targets();
    c.bench_function("localization/trivial_2x2", |b| {
        b.iter(|| {
            for x in &targets {
                localization_check(&ho, &m.w, x, &budget).unwrap();
            }
        })
    });
}

fn chain(c: &mut Criterion) {
    c.bench_function("chain_oracle/100", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            run_oracle(&mut rng, 100).unwrap()
        })
    });
}

fn simplicial(c: &mut Criterion) {
    let budget = Budget::default();
    c.bench_function("sd_standard/3", |b| b.iter(|| sd_standard(black_box(3))));
    let d3 = standard_simplex(3);
    c.bench_function("sd/Delta3", |b| b.iter(|| sd(black_box(&d3))));
    let n = nerve(&fixtures::lattice_2x2(), 3);
    c.bench_function("nerve/lattice_2x2", |b| b.iter(|| nerve(black_box(&fixtures::lattice_2x2()), 3)));
    c.bench_function("sd/N(lattice_2x2)", |b| b.iter(|| sd(black_box(&n))));
    let (bd, _) = boundary(2).unwrap();
    c.bench_function("ex/dDelta2/2", |b| b.iter(|| ex(black_box(&bd), 2, &budget).unwrap()));
}

criterion_group!(benches, model, ho, chain, simplicial);
criterion_main!(benches);
