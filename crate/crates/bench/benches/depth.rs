use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use randepth_core::depth::{exact_depth_2d, exact_depth_small_d, random_depth};
use randepth_core::dists::{pop_dir_cdf_batch, sample};
use randepth_core::median::random_tukey_median;
use randepth_core::sphere::sample_sphere;
use randepth_core::{DistributionSpec, McBudget, PointCloud, SeedSpec, Vector};

fn cloud(d: usize, n: usize) -> PointCloud {
    sample(&DistributionSpec::gaussian(d), n, &mut SeedSpec::new(1).rng("bench-cloud", 0)).unwrap()
}

fn bench_exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_depth");
    for n in [100, 1_000, 10_000] {
        let pts = cloud(2, n);
        let x = Vector::new(vec![0.1, -0.2]).unwrap();
        g.bench_with_input(BenchmarkId::new("sweep_2d", n), &pts, |b, pts| {
            b.iter(|| exact_depth_2d(pts, black_box(&x)))
        });
    }
    let pts = cloud(3, 40);
    let x = Vector::new(vec![0.1, -0.2, 0.3]).unwrap();
    g.bench_function("enumerate_3d_n40", |b| b.iter(|| exact_depth_small_d(&pts, black_box(&x))));
    g.finish();
}

fn bench_random(c: &mut Criterion) {
    let pts = cloud(10, 20_000);
    let x = Vector::zeros(10);
    let dirs = sample_sphere(10, 600, &mut SeedSpec::new(2).rng("bench-dirs", 0)).unwrap();
    c.bench_function("random_depth_d10_n20000_k600", |b| b.iter(|| random_depth(&pts, black_box(&x), &dirs)));
}

fn bench_population(c: &mut Criterion) {
    let dist = DistributionSpec::cube(200);
    let x = Vector::on_axis(200, 0, 3f64.sqrt());
    let dirs = sample_sphere(200, 100, &mut SeedSpec::new(3).rng("bench-dirs", 0)).unwrap();
    let budget = McBudget::new(20_000, 4);
    c.bench_function("pop_dir_cdf_cube_d200_k100_mc20000", |b| {
        b.iter(|| pop_dir_cdf_batch(&dist, black_box(&x), &dirs, budget))
    });
}

fn bench_median(c: &mut Criterion) {
    let mut g = c.benchmark_group("random_tukey_median");
    g.sample_size(10);
    for (d, n, k) in [(2, 2_000, 100), (10, 5_000, 200)] {
        let pts = cloud(d, n);
        let dirs = sample_sphere(d, k, &mut SeedSpec::new(5).rng("bench-dirs", 0)).unwrap();
        g.bench_function(format!("d{d}_n{n}_k{k}"), |b| b.iter(|| random_tukey_median(black_box(&pts), &dirs)));
    }
    g.finish();
}

criterion_group!(benches, bench_exact, bench_random, bench_population, bench_median);
criterion_main!(benches);
