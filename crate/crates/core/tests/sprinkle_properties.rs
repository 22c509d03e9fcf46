use causet_core::causal::{build_causal_matrix, build_link_matrix, transitive_closure};
use causet_core::geometry::{boost, in_lightcone_guard_band, to_lightcone, Event};
use causet_core::sprinkle::{diamond_contains, sprinkle, SprinkleConfig};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn quadrant_counts_are_uniform() {
    // Sub-diamonds are the lightcone quadrants.
    for seed in [1u64, 2, 3] {
        let s = sprinkle(&SprinkleConfig::new(100_000, 1.0, seed)).unwrap();
        let mut counts = [0f64; 4];
        for &e in &s.events {
            let p = to_lightcone(e);
            let q = (p.u_minus >= 0.0) as usize * 2 + (p.u_plus >= 0.0) as usize;
            counts[q] += 1.0;
        }
        let expected = s.len() as f64 / 4.0;
        let chi2: f64 = counts
            .iter()
            .map(|c| (c - expected).powi(2) / expected)
            .sum();
        let p = 1.0 - ChiSquared::new(3.0).unwrap().cdf(chi2);
        assert!(p > 0.001, "seed {seed}: chi2 {chi2}, p {p}");
    }
}

#[test]
fn scaled_diamond_contains_all_points() {
    for (size, seed) in [(0.01, 1), (3.0, 2), (250.0, 3)] {
        let s = sprinkle(&SprinkleConfig::new(2000, size, seed)).unwrap();
        assert!(s.events.iter().all(|&e| diamond_contains(size, e)));
    }
}

#[test]
fn causal_structure_round_trips_on_sprinkles() {
    for seed in 0..10 {
        let s = sprinkle(&SprinkleConfig::new(300, 1.0, seed)).unwrap();
        let c = build_causal_matrix(&s);
        let l = build_link_matrix(&c).unwrap();
        assert_eq!(transitive_closure(&l), c);
        assert_eq!(build_link_matrix(&transitive_closure(&l)).unwrap(), l);
    }
}

#[test]
fn boosted_sprinkle_has_same_causal_matrix() {
    let s = sprinkle(&SprinkleConfig::new(400, 1.0, 5)).unwrap();
    let c = build_causal_matrix(&s);
    for beta in [-0.99, -0.5, 0.3, 0.9] {
        let boosted: Vec<Event> = s.events.iter().map(|&e| boost(e, beta).unwrap()).collect();
        let mut order: Vec<usize> = (0..boosted.len()).collect();
        order.sort_by(|&a, &b| boosted[a].canonical_cmp(&boosted[b]));
        let sorted: Vec<Event> = order.iter().map(|&i| boosted[i]).collect();
        let cb = causet_core::causal::causal_matrix_from_events(&sorted);
        // position of original event i in the boosted order
        let mut perm = vec![0; order.len()];
        for (pos, &i) in order.iter().enumerate() {
            perm[i] = pos;
        }
        let guarded = (0..s.len())
            .flat_map(|i| (i + 1..s.len()).map(move |j| (i, j)))
            .any(|(i, j)| in_lightcone_guard_band(s.events[i], s.events[j]));
        assert!(!guarded);
        assert_eq!(c.bits().permuted(&perm), *cb.bits(), "beta {beta}");
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    let s = sprinkle(&SprinkleConfig::new(5000, 2.5, 99)).unwrap();
    let back = causet_core::sprinkle::Sprinkle::from_json(&s.to_json().unwrap()).unwrap();
    assert_eq!(back.config, s.config);
    for (a, b) in s.events.iter().zip(&back.events) {
        assert_eq!(
            (a.t.to_bits(), a.x.to_bits()),
            (b.t.to_bits(), b.x.to_bits())
        );
    }
}
