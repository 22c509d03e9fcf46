//! Path counts, chain enumeration and amplitude sums against brute-force
//! recursive enumeration on small random posets.

use causet_core::bitmatrix::BitMatrix;
use causet_core::causal::{build_link_matrix, enumerate_chains, transitive_closure, LinkMatrix};
use causet_core::rng::CounterRng;
use causet_core::worldline::{
    build_ensemble, nilpotency_index, path_count_matrix, path_counts_by_length, total_amplitude,
    AmplitudeModel, Normalization,
};
use num_complex::Complex64;
use num_traits::ToPrimitive;

/// Random strict order on `n` elements: closure of a random DAG on 0..n.
fn random_poset(rng: &mut CounterRng, n: usize, density: f64) -> LinkMatrix {
    let mut dag = BitMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_unit() < density {
                dag.set(i, j, true);
            }
        }
    }
    let c = transitive_closure(&LinkMatrix::try_from_bits(dag).unwrap());
    build_link_matrix(&c).unwrap()
}

fn to_adjacency(l: &BitMatrix) -> Vec<Vec<bool>> {
    (0..l.n())
        .map(|i| (0..l.n()).map(|j| l.get(i, j)).collect())
        .collect()
}

fn dfs_paths(
    adj: &[Vec<bool>],
    from: usize,
    to: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if from == to {
        out.push(path.clone());
        return;
    }
    for next in 0..adj.len() {
        if adj[from][next] {
            path.push(next);
            dfs_paths(adj, next, to, path, out);
            path.pop();
        }
    }
}

fn all_paths(adj: &[Vec<bool>], i: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    dfs_paths(adj, i, j, &mut vec![i], &mut out);
    out
}

#[test]
fn counts_match_dfs_on_random_posets() {
    let mut rng = CounterRng::new(2024);
    for trial in 0..200 {
        let n = 1 + trial % 10;
        let l = random_poset(&mut rng, n, 0.4);
        let adj = to_adjacency(&l);
        let counts = path_count_matrix(&l).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                let paths = all_paths(&adj, i, j);
                assert_eq!(counts.get_u64(i, j), Some(paths.len() as u64));
                let hop1 = total_amplitude(&l, AmplitudeModel::real(1.0), i, j).unwrap();
                assert_eq!(hop1, Complex64::new(paths.len() as f64, 0.0));
                let e = enumerate_chains(&l, i, j, usize::MAX).unwrap();
                let got: Vec<Vec<usize>> = e.chains.iter().map(|c| c.indices().to_vec()).collect();
                let mut sorted = paths.clone();
                sorted.sort();
                assert_eq!(got, sorted, "lexicographic enumeration");
            }
        }
    }
}

#[test]
fn amplitude_matches_brute_force_sum() {
    let mut rng = CounterRng::new(77);
    let hops = [
        Complex64::new(0.3, 0.4),
        Complex64::new(-1.1, 0.2),
        Complex64::new(0.0, 1.0),
    ];
    for trial in 0..100 {
        let n = 2 + trial % 9;
        let l = random_poset(&mut rng, n, 0.5);
        let adj = to_adjacency(&l);
        for &hop in &hops {
            for i in 0..n {
                for j in i + 1..n {
                    let brute: Complex64 = all_paths(&adj, i, j)
                        .iter()
                        .map(|p| hop.powu((p.len() - 1) as u32))
                        .sum();
                    let series = total_amplitude(&l, AmplitudeModel::new(hop), i, j).unwrap();
                    assert!((series - brute).norm() < 1e-12, "{series} vs {brute}");
                }
            }
        }
    }
}

#[test]
fn ensemble_total_matches_series() {
    let mut rng = CounterRng::new(8);
    let model = AmplitudeModel::new(Complex64::new(0.7, -0.2));
    for _ in 0..50 {
        let l = random_poset(&mut rng, 8, 0.5);
        for i in 0..8 {
            for j in i + 1..8 {
                let e = build_ensemble(&l, model, i, j, 1_000_000, Normalization::Born).unwrap();
                assert!(!e.truncated);
                let series = total_amplitude(&l, model, i, j).unwrap();
                assert!((e.total - series).norm() < 1e-12);
                if !e.is_empty() {
                    let s: f64 = e.weights.iter().sum();
                    assert!((s - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn relation_chains_via_causal_matrix() {
    let mut rng = CounterRng::new(3);
    for _ in 0..30 {
        let l = random_poset(&mut rng, 7, 0.5);
        let c = transitive_closure(&l);
        let adj = to_adjacency(&c);
        let counts = path_count_matrix(&c).unwrap();
        for i in 0..7 {
            for j in i + 1..7 {
                assert_eq!(
                    counts.get_u64(i, j),
                    Some(all_paths(&adj, i, j).len() as u64)
                );
            }
        }
    }
}

/// Evaluating the amplitude at the m-th roots of unity and applying the
/// inverse DFT recovers the per-length path counts.
#[test]
fn amplitude_polynomial_interpolates_length_counts() {
    let mut rng = CounterRng::new(55);
    for _ in 0..40 {
        let l = random_poset(&mut rng, 9, 0.5);
        let m = nilpotency_index(&l).unwrap().max(3);
        for i in 0..9 {
            for j in i + 1..9 {
                let values: Vec<Complex64> = (0..m)
                    .map(|k| {
                        let z = Complex64::from_polar(
                            1.0,
                            2.0 * std::f64::consts::PI * k as f64 / m as f64,
                        );
                        total_amplitude(&l, AmplitudeModel::new(z), i, j).unwrap()
                    })
                    .collect();
                let exact = path_counts_by_length(&l, i, j).unwrap();
                for d in 0..m {
                    let coeff: Complex64 = values
                        .iter()
                        .enumerate()
                        .map(|(k, v)| {
                            v * Complex64::from_polar(
                                1.0,
                                -2.0 * std::f64::consts::PI * (k * d) as f64 / m as f64,
                            )
                        })
                        .sum::<Complex64>()
                        / m as f64;
                    let want = exact.get(d).map_or(0.0, |c| c.to_f64().unwrap());
                    assert!((coeff.re - want).abs() < 1e-9 && coeff.im.abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn nilpotent_power_vanishes() {
    let mut rng = CounterRng::new(12);
    for _ in 0..20 {
        let n = 9;
        let l = random_poset(&mut rng, n, 0.5);
        let adj = to_adjacency(&l);
        // boolean matrix power L^n by repeated multiplication
        let mut power = adj.clone();
        for _ in 1..n {
            power = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).any(|k| power[i][k] && adj[k][j]))
                        .collect()
                })
                .collect();
        }
        assert!(power.iter().flatten().all(|&b| !b));
    }
}

#[test]
fn symmetric_chains_get_equal_weights() {
    // 0 -> {1, 2, 3} -> 4: swapping the middle elements is an automorphism.
    let adj = BitMatrix::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap();
    let l = LinkMatrix::try_from_bits(adj).unwrap();
    for hop in [Complex64::new(0.2, 0.9), Complex64::new(3.0, 0.0)] {
        for norm in [Normalization::Born, Normalization::Linear] {
            let e = build_ensemble(&l, AmplitudeModel::new(hop), 0, 4, 100, norm).unwrap();
            assert_eq!(e.chains.len(), 3);
            for w in &e.weights {
                assert!((w - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }
}
