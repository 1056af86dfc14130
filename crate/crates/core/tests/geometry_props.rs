use proptest::prelude::*;
use sublevelstat::complex::SimplicialComplex;
use sublevelstat::filtration::{lower_star_filtration, sublevel_complex, VertexField};
use sublevelstat::mesh::{geodesic_distance, triangulate, ManifoldKind};
use sublevelstat::synth::{random_point, SeededStream};

fn manifolds() -> Vec<ManifoldKind> {
    vec![
        ManifoldKind::disk(10.0).unwrap(),
        ManifoldKind::Sphere2,
        ManifoldKind::torus(2.0, 3.0).unwrap(),
    ]
}

#[test]
fn meshes_have_the_right_euler_characteristic() {
    for m in manifolds() {
        let expected = match m {
            ManifoldKind::Disk { .. } => 1,
            ManifoldKind::Sphere2 => 2,
            ManifoldKind::Torus2 { .. } => 0,
        };
        let resolutions: &[usize] = if m == ManifoldKind::Sphere2 { &[1, 2, 3, 4] } else { &[3, 4, 7, 12] };
        for &r in resolutions {
            let mesh = triangulate(&m, r).unwrap();
            assert_eq!(mesh.euler_characteristic(), expected, "{m:?} at {r}");
            mesh.check_invariants().unwrap();
            for v in &mesh.vertices {
                m.validate(v).unwrap();
            }
            assert_eq!(SimplicialComplex::from_mesh(&mesh).euler_characteristic(), expected);
        }
    }
}

#[test]
fn geodesic_triangle_inequality() {
    for m in manifolds() {
        let mut rng = SeededStream::new(31, 0);
        for _ in 0..1000 {
            let (x, y, z) = (random_point(&m, &mut rng), random_point(&m, &mut rng), random_point(&m, &mut rng));
            let d = |a, b| geodesic_distance(&m, a, b).unwrap();
            assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
            assert_eq!(d(&x, &y), d(&y, &x));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prefixes_are_sublevel_complexes(seed in any::<u64>(), levels in 1usize..6) {
        let mesh = triangulate(&ManifoldKind::torus(1.0, 1.0).unwrap(), 4).unwrap();
        let c = SimplicialComplex::from_mesh(&mesh);
        let mut rng = SeededStream::new(seed, 0);
        let values: Vec<f64> = (0..mesh.vertices.len())
            .map(|_| (rng.uniform() * levels as f64).floor())
            .collect();
        let field = VertexField::new(&c, values).unwrap();
        let filt = lower_star_filtration(&field);
        filt.check().unwrap();
        let mut previous: Option<SimplicialComplex> = None;
        for r in filt.levels() {
            let sub = sublevel_complex(&field, r);
            let mut prefix: Vec<_> = filt.prefix(r).cloned().collect();
            let mut expected: Vec<_> = sub.iter().cloned().collect();
            prefix.sort();
            expected.sort();
            prop_assert_eq!(prefix, expected);
            if let Some(p) = &previous {
                prop_assert!(p.iter().all(|s| sub.contains(s)));
            }
            previous = Some(sub);
        }
    }
}
