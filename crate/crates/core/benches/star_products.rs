//! Star-product workloads under the rayon pool and on a single thread.
//! Build with `--no-default-features` for the plain sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stardeform::coeff::CoeffKind;
use stardeform::fixture::{bott_projection, moyal_plane};
use stardeform::matrix::deform_projection_fedosov;
use stardeform::sample::Sampler;
use stardeform::star::{check_associativity, standard_theta, StarAlgebra};

#[cfg(feature = "parallel")]
struct Mode(Option<rayon::ThreadPool>);

#[cfg(feature = "parallel")]
impl Mode {
    fn all() -> Vec<(&'static str, Mode)> {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        vec![("rayon", Mode(None)), ("one_thread", Mode(Some(single)))]
    }

    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.0 {
            None => f(),
            Some(pool) => pool.install(f),
        }
    }
}

#[cfg(not(feature = "parallel"))]
struct Mode;

#[cfg(not(feature = "parallel"))]
impl Mode {
    fn all() -> Vec<(&'static str, Mode)> {
        vec![("sequential", Mode)]
    }

    fn run<R>(&self, f: impl FnOnce() -> R) -> R {
        f()
    }
}

fn bench(c: &mut Criterion) {
    let plane = moyal_plane(3).unwrap();
    let p0 = bott_projection(&plane).unwrap();
    let moyal = StarAlgebra::moyal(1, &standard_theta(1), CoeffKind::Polynomial, 4).unwrap();
    let mut s = Sampler::new(1);
    let (r, n) = (moyal.ring(), moyal.order());
    let triples: Vec<_> = (0..20).map(|_| (s.series(r, n), s.series(r, n), s.series(r, n))).collect();
    let a = s.matrix(r, n, 4, 4);
    let b = s.matrix(r, n, 4, 4);

    let mut group = c.benchmark_group("star");
    group.sample_size(10);
    for (name, mode) in Mode::all() {
        group.bench_function(BenchmarkId::new("associativity_20", name), |bench| {
            bench.iter(|| mode.run(|| check_associativity(&moyal, &triples).unwrap()))
        });
        group.bench_function(BenchmarkId::new("matrix_4x4_n4", name), |bench| {
            bench.iter(|| mode.run(|| a.star_mul(&moyal, &b).unwrap()))
        });
        group.bench_function(BenchmarkId::new("bott_fedosov_n3", name), |bench| {
            bench.iter(|| mode.run(|| deform_projection_fedosov(&plane, &p0, true).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
