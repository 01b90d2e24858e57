use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use supcone::cone::support_cone;
use supcone::harness::{parse_scene, verify_scene};
use supcone::{congruence_distance, detect_symmetries, CongruenceConfig, ConvexBody3, Point3};

fn cube() -> ConvexBody3 {
    let v: Vec<Point3> = (0..8)
        .map(|i| {
            let s = |b: usize| if i >> b & 1 == 1 { 1.0 } else { -1.0 };
            Point3::new(s(0), s(1), s(2))
        })
        .collect();
    ConvexBody3::polytope(&v).unwrap()
}

fn congruence(c: &mut Criterion) {
    let cfg = CongruenceConfig::default();
    let body = cube();
    let face = support_cone(&body, &Point3::new(4.0, 0.0, 0.0), 0).unwrap();
    let diagonal = support_cone(&body, &(Point3::new(1.0, 1.0, 1.0) * 2.0), 0).unwrap();
    let edge = support_cone(&body, &Point3::new(0.0, 3.0, 3.0), 0).unwrap();
    let mut g = c.benchmark_group("congruence");
    g.sample_size(20);
    g.bench_function("polyhedral_congruent", |b| {
        let moved = support_cone(&body, &Point3::new(0.0, -4.0, 0.0), 0).unwrap();
        b.iter(|| congruence_distance(black_box(&face), black_box(&moved), &cfg))
    });
    g.bench_function("polyhedral_global_search", |b| {
        b.iter(|| congruence_distance(black_box(&face), black_box(&diagonal), &cfg))
    });
    g.bench_function("polyhedral_edge_vs_face", |b| {
        b.iter(|| congruence_distance(black_box(&edge), black_box(&face), &cfg))
    });
    let ellipsoid = ConvexBody3::ellipsoid(
        Point3::zeros(),
        nalgebra::Vector3::new(2.0, 1.0, 1.0),
        nalgebra::Matrix3::identity(),
    )
    .unwrap();
    let x = support_cone(&ellipsoid, &Point3::new(5.0, 0.0, 0.0), 256).unwrap();
    let y = support_cone(&ellipsoid, &Point3::new(0.0, 5.0, 0.0), 256).unwrap();
    g.bench_function("sampled_256", |b| {
        b.iter(|| congruence_distance(black_box(&x), black_box(&y), &cfg))
    });
    g.bench_function("symmetry_sampled_256", |b| {
        b.iter(|| detect_symmetries(black_box(&y), 1e-3))
    });
    g.finish();
}

fn scene(c: &mut Criterion) {
    let ball = parse_scene(
        r#"{"inner": {"kind": "ball", "radius": 1.0}, "outer": {"kind": "ball", "radius": 3.0},
            "sampling": {"count": 20}}"#,
    )
    .unwrap();
    let mut g = c.benchmark_group("scene");
    g.sample_size(10);
    g.bench_function("verify_ball_20", |b| {
        b.iter(|| verify_scene(black_box(&ball)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, congruence, scene);
criterion_main!(benches);
