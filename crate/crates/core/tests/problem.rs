use mbqaoa::linalg::{c64, kron, pauli_z, LinearMap};
use mbqaoa::problem::{bits_of, cut_size, maxcut_to_qubo, mis_brute_force, Graph, MisInstance, QuboProblem};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn petersen_cost_counts_crossing_edges() {
    let g = Graph::petersen();
    let q = maxcut_to_qubo(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let x: Vec<u8> = (0..10).map(|_| rng.random_range(0..2)).collect();
        let crossing = g.edges().iter().filter(|&&(a, b)| x[a] != x[b]).count();
        assert_eq!(q.cost(&x), crossing as f64);
        assert_eq!(cut_size(&g, &x), crossing);
    }
}

/// `Z_v` on `n` qubits, with qubit `v` at bit `v` of the basis index.
fn z_on(n: usize, v: usize) -> LinearMap {
    (0..n).rev().fold(LinearMap::identity(0), |acc, w| {
        let site = if w == v { pauli_z() } else { LinearMap::identity(1) };
        kron(&acc, &site)
    })
}

#[test]
fn cost_matches_hamiltonian_diagonal() {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut q = QuboProblem::new(n).unwrap();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_bool(0.4) {
                q.add_quadratic(u, v, rng.random_range(-2.0..2.0)).unwrap();
            }
        }
        q.add_linear(u, rng.random_range(-1.0..1.0)).unwrap();
    }
    q.set_constant(0.75);
    let zs: Vec<LinearMap> = (0..n).map(|v| z_on(n, v)).collect();
    let mut h = LinearMap::identity(n).scale(c64(q.constant(), 0.0));
    let add =
        |h: &LinearMap, t: &LinearMap, w: f64| LinearMap::from_matrix(h.matrix() + t.matrix() * c64(w, 0.0));
    for ((a, b), j) in q.quadratic() {
        h = add(&h, &zs[a].compose(&zs[b]), j);
    }
    for (v, w) in q.linear() {
        h = add(&h, &zs[v], w);
    }
    for _ in 0..100 {
        let k = rng.random_range(0..1usize << n);
        let x = bits_of(k, n);
        assert!((q.cost(&x) - h.get(k, k).re).abs() < 1e-12);
    }
}

/// Largest clique by Bron–Kerbosch with pivoting.
fn max_clique(g: &Graph) -> usize {
    fn bk(g: &Graph, r: usize, p: Vec<usize>, x: Vec<usize>, best: &mut usize) {
        if p.is_empty() && x.is_empty() {
            *best = (*best).max(r);
            return;
        }
        let pivot = *p.iter().chain(&x).next().unwrap();
        let (mut p, mut x) = (p, x);
        for v in p.clone() {
            if g.has_edge(pivot, v) {
                continue;
            }
            let nb = |s: &[usize]| {
                s.iter()
                    .copied()
                    .filter(|&w| g.has_edge(v, w))
                    .collect::<Vec<_>>()
            };
            bk(g, r + 1, nb(&p), nb(&x), best);
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut best = 0;
    bk(g, 0, (0..g.n()).collect(), vec![], &mut best);
    best
}

#[test]
fn mis_matches_complement_clique() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let g = Graph::random(10, 0.4, &mut rng);
        let r = mis_brute_force(&MisInstance::new(g.clone())).unwrap();
        assert_eq!(r.value as usize, max_clique(&g.complement()));
    }
}

#[test]
fn complete_graph_cut_is_balanced() {
    for n in 2..=9 {
        let r = maxcut_to_qubo(&Graph::complete(n))
            .unwrap()
            .brute_force_optimum()
            .unwrap();
        assert_eq!(r.value, ((n / 2) * n.div_ceil(2)) as f64);
    }
}
