use mixquant::measures::{Arc, Geometry, Interval, PlanarSegment};
use mixquant::oracle::{lloyd_run, LloydConfig};
use mixquant::segments::{connected, disconnected};
use mixquant::{MixedMeasure, Model, Point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn measures() -> Vec<(&'static str, MixedMeasure)> {
    vec![
        ("circle-diameter", MixedMeasure::circle_diameter()),
        ("disconnected", MixedMeasure::disconnected()),
        ("connected", MixedMeasure::connected()),
        (
            "arc+segment",
            MixedMeasure::from_parts(&[
                (Geometry::Arc(Arc::new(0.3, 2.2).unwrap()), 0.3),
                (
                    Geometry::Segment(PlanarSegment::new(Point::new(-1.0, -0.5), Point::new(0.5, 1.5)).unwrap()),
                    0.7,
                ),
            ])
            .unwrap(),
        ),
    ]
}

fn point_in(dim: usize) -> impl Strategy<Value = Point> {
    if dim == 1 {
        (-0.5f64..1.5).prop_map(Point::on_line).boxed()
    } else {
        (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(x, y)| Point::new(x, y)).boxed()
    }
}

fn codebook(dim: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point_in(dim), 1..12)
}

#[test]
fn distortion_at_mean_is_variance() {
    for (name, m) in measures() {
        let v = m.distortion_of(&[m.mean()]);
        assert!((v - m.variance()).abs() < 1e-10, "{name}: {v} vs {}", m.variance());
    }
}

#[test]
fn weights_and_masses() {
    for (name, m) in measures() {
        let total: f64 = m.components().iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-12, "{name}");
        for c in m.components() {
            let (lo, hi) = c.geometry.param_range();
            let mass = c.moments(lo, hi).mass;
            assert!((mass - c.weight).abs() < 1e-12, "{name}: {mass} vs {}", c.weight);
        }
        assert!((m.total_moments().mass - 1.0).abs() < 1e-12, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn distortion_is_nonnegative_and_monotone(pts in codebook(2), extra in point_in(2), pts1 in codebook(1), extra1 in point_in(1)) {
        for (_, m) in measures() {
            let (base, add) = if m.ambient_dim() == 1 { (&pts1, extra1) } else { (&pts, extra) };
            let d = m.distortion_of(base);
            prop_assert!(d >= 0.0);
            let mut more = base.clone();
            more.push(add);
            prop_assert!(m.distortion_of(&more) <= d + 1e-15 * d.max(1.0));
        }
    }

    #[test]
    fn exact_matches_quadrature_circle(pts in codebook(2)) {
        let m = MixedMeasure::circle_diameter();
        let exact = m.distortion_of(&pts);
        let quad = m.distortion_quadrature(&pts, 1e-11);
        prop_assert!((exact - quad).abs() < 1e-8, "{exact} vs {quad}");
    }

    #[test]
    fn exact_matches_quadrature_segments(pts in codebook(1)) {
        for m in [MixedMeasure::disconnected(), MixedMeasure::connected()] {
            let exact = m.distortion_of(&pts);
            let quad = m.distortion_quadrature(&pts, 1e-11);
            prop_assert!((exact - quad).abs() < 1e-8, "{exact} vs {quad}");
        }
    }

    #[test]
    fn exact_matches_quadrature_mixed_geometry(pts in codebook(2)) {
        let (_, m) = measures().pop().unwrap();
        let exact = m.distortion_of(&pts);
        let quad = m.distortion_quadrature(&pts, 1e-11);
        prop_assert!((exact - quad).abs() < 1e-8, "{exact} vs {quad}");
    }

    #[test]
    fn lloyd_history_never_increases(seed in any::<u64>(), n in 1usize..9) {
        for (_, m) in measures() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let init: Vec<Point> = (0..n).map(|_| m.sample(&mut rng)).collect();
            if let Ok(run) = lloyd_run(&m, init, 500, 1e-10, &mut rng) {
                if run.reseeds == 0 {
                    prop_assert!(run.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15));
                }
            }
        }
    }

    #[test]
    fn interval_voronoi_cells_cover_measure(lo in -2.0f64..0.0, len in 0.1f64..3.0, pts in codebook(1)) {
        let m = MixedMeasure::uniform(Geometry::Interval(Interval::new(lo, lo + len).unwrap()));
        let mass: f64 = m.voronoi_regions(&pts).iter().map(|r| m.region_moments(r).mass).sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
    }
}

#[test]
fn allocation_steps_are_zero_or_one() {
    let a: Vec<usize> = (2..=200).map(|n| disconnected::local_search_alloc(n).unwrap()).collect();
    assert!(a.windows(2).all(|w| w[1] - w[0] <= 1));
    let h: Vec<usize> = (2..=200).map(|n| disconnected::alloc_disconnected(n).unwrap()).collect();
    assert!(h.windows(2).all(|w| w[1] >= w[0] && w[1] - w[0] <= 1));
    let c: Vec<usize> = (2..=100).map(|n| connected::local_search_alloc(n).unwrap()).collect();
    assert!(c.windows(2).all(|w| w[1] >= w[0] && w[1] - w[0] <= 1));
}

#[test]
fn disconnected_allocation_beats_neighbours() {
    for n in 2..=200 {
        let k = disconnected::local_search_alloc(n).unwrap();
        let v = disconnected::split_error(n, k).unwrap();
        for j in [k.wrapping_sub(1), k + 1] {
            if let Ok(w) = disconnected::split_error(n, j) {
                assert!(v < w, "n={n} k={k} j={j}");
            }
        }
    }
}

#[test]
fn connected_formula_allocation_record() {
    let differ: Vec<usize> = (2..=100)
        .filter(|&n| connected::local_search_alloc(n).unwrap() != connected::formula_alloc_connected(n))
        .collect();
    assert_eq!(&differ[..3], &[7, 12, 14]);
    for &n in &differ {
        let k = connected::local_search_alloc(n).unwrap();
        let best = connected::best_configuration(n, k).unwrap().unwrap().error;
        let formula = connected::best_configuration(n, connected::formula_alloc_connected(n))
            .unwrap()
            .map_or(f64::INFINITY, |s| s.error);
        assert!(best < formula, "n={n}");
    }
}

#[test]
fn circle_codebooks_are_symmetric() {
    for n in 2..=20 {
        let r = Model::CircleDiameter.optimal_set(n).unwrap();
        let pts = r.codebook.points();
        for p in pts {
            let mirror = Point::new(-p.x, p.y);
            let d = pts.iter().map(|q| q.dist(mirror)).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9, "n={n}: {p:?} has no mirror image");
        }
        if let Some(mixquant::Allocation::Circle(t)) = r.allocation {
            if t.n1 == t.n2 && n >= 4 {
                let (_, q, _) = mixquant::circle_diameter::optimal_configuration(n).unwrap();
                let j = mixquant::circle_diameter::JunctionPoints::from_params(&q);
                assert!(j.s.abs() < 1e-12, "n={n}: s={}", j.s);
            }
        }
    }
}

#[test]
fn segment_lloyd_matches_closed_form_tightly() {
    let config = LloydConfig {
        restarts: 32,
        seed: 7,
        ..LloydConfig::default()
    };
    for model in [Model::Disconnected, Model::Connected] {
        let m = model.measure();
        for n in 1..=20 {
            let cf = model.optimal_set(n).unwrap();
            let ll = mixquant::oracle::lloyd(&m, n, &config).unwrap();
            assert!((cf.error - ll.error).abs() < 1e-9, "{model} n={n}: {} vs {}", cf.error, ll.error);
            let (a, b) = (cf.codebook.xs(), ll.codebook.xs());
            let d = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            assert!(d < 1e-6, "{model} n={n}: codebook distance {d}");
        }
    }
}

#[test]
fn circle_lloyd_never_beats_closed_form() {
    let config = LloydConfig {
        restarts: 64,
        seed: 11,
        ..LloydConfig::default()
    };
    let m = MixedMeasure::circle_diameter();
    for n in 1..=12 {
        let cf = Model::CircleDiameter.optimal_set(n).unwrap();
        let ll = mixquant::oracle::lloyd(&m, n, &config).unwrap();
        assert!(ll.error >= cf.error - 1e-6, "n={n}");
        assert!(ll.error <= cf.error + 1e-6, "n={n}");
    }
}
