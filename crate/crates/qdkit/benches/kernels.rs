//! Data-parallel kernels. Run once with the default features and once with
//! `--no-default-features`; with rayon enabled each kernel is also timed on a
//! one-thread pool so both paths appear in a single report.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qdkit::construct::{build_bounded_config, raster_face_count, RASTER_RESOLUTION};
use qdkit::curvegeo::{find_double_points, Family, DEFAULT_GRID};
use qdkit::lenssolve::{random_hyperbolic_map, solve_lens_batch, RESIDUAL_TOL};
use qdkit::par::is_parallel;
use qdkit::ratfun::RationalMap;
use qdkit::suffridge::known_suffridge;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn mode() -> &'static str {
    if is_parallel() {
        "parallel"
    } else {
        "sequential"
    }
}

/// Times `f` in the build's own mode and, with rayon, on a single thread.
fn both<F: Fn() + Sync>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::from_parameter(mode()), |b| b.iter(&f));
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("one-thread pool");
        g.bench_function(BenchmarkId::from_parameter("rayon-1-thread"), |b| b.iter(|| pool.install(&f)));
    }
    g.finish();
}

fn double_point_scan(c: &mut Criterion) {
    let map = known_suffridge(Family::Sigma, 5).unwrap();
    both(c, "double_point_scan_sigma5", || {
        black_box(find_double_points(&map, DEFAULT_GRID).unwrap());
    });
}

fn raster_oracle(c: &mut Criterion) {
    let plan = build_bounded_config(&[2, 2]).unwrap();
    both(c, "raster_oracle_bqd_2_2", || {
        black_box(raster_face_count(&plan.pieces, RASTER_RESOLUTION).unwrap());
    });
}

fn lens_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let maps: Vec<RationalMap> = (0..64).map(|k| random_hyperbolic_map(&mut rng, 2 + k % 5)).collect();
    both(c, "lens_batch_64", || {
        black_box(solve_lens_batch(&maps, RESIDUAL_TOL));
    });
}

criterion_group!(kernels, double_point_scan, raster_oracle, lens_batch);
criterion_main!(kernels);
