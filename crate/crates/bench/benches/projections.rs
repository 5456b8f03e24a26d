use std::hint::black_box;

use conelaw::constitutive::{integrate_path, DriftPolicy, DriverConfig, MaterialState, StrainPath};
use conelaw::sampling::{
    random_tensor, tresca_degenerate_surface, tresca_smooth_surface, von_mises_surface,
};
use conelaw::{project, ElasticModuli, SymTensor3, YieldDomain};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cases(sample: impl Fn(&mut ChaCha8Rng) -> SymTensor3) -> Vec<(SymTensor3, SymTensor3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..256)
        .map(|_| (sample(&mut rng), random_tensor(&mut rng, 1.0)))
        .collect()
}

type Cases = Vec<(SymTensor3, SymTensor3)>;

fn bench_projections(c: &mut Criterion) {
    let vm = YieldDomain::von_mises(1.0).unwrap();
    let tr = YieldDomain::tresca(1.0).unwrap();
    let groups: [(&str, &YieldDomain, Cases); 3] = [
        ("von_mises", &vm, cases(|r| von_mises_surface(r, 1.0))),
        (
            "tresca_smooth",
            &tr,
            cases(|r| tresca_smooth_surface(r, 1.0, 1e-2)),
        ),
        (
            "tresca_degenerate",
            &tr,
            cases(|r| tresca_degenerate_surface(r, 1.0, 3)),
        ),
    ];
    for (name, domain, data) in groups {
        c.bench_function(&format!("project/{name}"), |b| {
            b.iter(|| {
                for &(s, t) in &data {
                    black_box(project(domain, black_box(s), black_box(t)).unwrap());
                }
            })
        });
    }
}

fn bench_driver(c: &mut Criterion) {
    let domain = YieldDomain::von_mises(1.0).unwrap();
    let moduli = ElasticModuli::from_lame(1.0, 1.0, 1.0).unwrap();
    let path = StrainPath::constant(SymTensor3::new(0.0, 0.0, 0.0, 0.1, 0.0, 0.0), 10.0).unwrap();
    let config = DriverConfig::new(1e-3, DriftPolicy::RadialReturn);
    c.bench_function("drive/shear_ramp_1e4_steps", |b| {
        b.iter(|| {
            integrate_path(&domain, &moduli, MaterialState::default(), &path, &config).unwrap()
        })
    });
}

criterion_group!(benches, bench_projections, bench_driver);
criterion_main!(benches);
