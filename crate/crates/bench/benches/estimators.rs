use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use multifract::dea::{collect_fluctuations, delta_spectrum, BinRule};
use multifract::mfdfa::{fluctuation_function, h_spectrum, rescaled_range, DfaConfig};
use multifract::partition::partition_function;
use multifract::spectrum::{legendre_f_to_tau, legendre_tau_to_f};
use multifract::synth::{analytic_tau_cascade, generate, GeneratorModel, GeneratorSpec};
use multifract::{QGrid, ScaleGrid};

use multifract_bench::{cascade, white_noise};

fn bench_mfdfa(c: &mut Criterion) {
    let mut group = c.benchmark_group("mfdfa");
    for &exp in &[12u32, 14, 16] {
        let series = white_noise(1 << exp, 7);
        let cfg = DfaConfig::new(
            1,
            QGrid::range(-3.0, 3.0, 0.5).unwrap(),
            ScaleGrid::log_spaced(16, 1 << (exp - 3), 14).unwrap(),
        );
        group.bench_with_input(
            BenchmarkId::new("fluctuation_surface", 1 << exp),
            &series,
            |b, s| {
                b.iter(|| {
                    let surf = fluctuation_function(black_box(s), &cfg).unwrap();
                    h_spectrum(&surf.value, None).unwrap()
                })
            },
        );
    }
    group.finish();
}

fn bench_rescaled_range(c: &mut Criterion) {
    let series = white_noise(1 << 16, 3);
    let grid = ScaleGrid::log_spaced(64, 16384, 10).unwrap();
    c.bench_function("rescaled_range/65536", |b| {
        b.iter(|| rescaled_range(black_box(&series), &grid).unwrap())
    });
}

fn bench_dea(c: &mut Criterion) {
    let increments = white_noise(1 << 14, 5);
    let grid = ScaleGrid::log_spaced(8, 1024, 10).unwrap();
    let q = QGrid::range(0.5, 3.0, 0.5).unwrap();
    c.bench_function("dea/delta_spectrum/16384", |b| {
        b.iter(|| {
            let ens = collect_fluctuations(black_box(&increments), &grid).unwrap();
            delta_spectrum(&ens, &q, &BinRule::FreedmanDiaconis, false).unwrap()
        })
    });
}

fn bench_partition(c: &mut Criterion) {
    let g = cascade(12, 1);
    let measures = g.cascade_measures.unwrap();
    let q = QGrid::range(-4.0, 4.0, 0.25).unwrap();
    c.bench_function("partition_function/levels6-12", |b| {
        b.iter(|| partition_function(black_box(&measures[5..=11]), &q).unwrap())
    });
}

fn bench_legendre(c: &mut Criterion) {
    let q = QGrid::range(-4.0, 4.0, 0.01).unwrap();
    let tau = analytic_tau_cascade(0.6, &q).unwrap();
    c.bench_function("legendre/round_trip_801", |b| {
        b.iter(|| {
            let f = legendre_tau_to_f(black_box(&tau)).unwrap();
            legendre_f_to_tau(&f.value, q.values()).unwrap()
        })
    });
}

fn bench_generators(c: &mut Criterion) {
    let mut group = c.benchmark_group("synth");
    group.sample_size(10);
    group.bench_function("gaussian_white/65536", |b| {
        b.iter(|| white_noise(1 << 16, black_box(11)))
    });
    group.bench_function("fgn_hosking/4096", |b| {
        b.iter(|| {
            generate(&GeneratorSpec {
                model: GeneratorModel::Fgn { hurst: 0.7 },
                length: 1 << 12,
                seed: black_box(2),
            })
            .unwrap()
        })
    });
    group.bench_function("binomial_cascade/65536", |b| {
        b.iter(|| cascade(16, black_box(3)))
    });
    group.bench_function("levy/65536", |b| {
        b.iter(|| {
            generate(&GeneratorSpec {
                model: GeneratorModel::Levy { mu: 1.5 },
                length: 1 << 16,
                seed: black_box(4),
            })
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_mfdfa,
    bench_rescaled_range,
    bench_dea,
    bench_partition,
    bench_legendre,
    bench_generators
);
criterion_main!(benches);
