use motif_forge_core::baselines::{dominated, enumerate_exact, enumerate_naive, mine_rand_esu, PerfectEmbedding};
use motif_forge_core::count::{anchored_frequency, graph_level_frequency};
use motif_forge_core::encoder::{EncoderConfig, EncoderModel, Embedder};
use motif_forge_core::iso::{exact_isomorphic, is_anchored_subgraph};
use motif_forge_core::metrics::hit_rate;
use motif_forge_core::rng::seeded;
use motif_forge_core::sample::grow_from;
use motif_forge_core::synth::{Family, GeneratorConfig};
use motif_forge_core::wl::canonical_key;
use motif_forge_core::{Graph, NodeId};
use proptest::prelude::*;

fn graph(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::empty(n);
            let mut it = bits.into_iter();
            for u in 0..n as NodeId {
                for v in u + 1..n as NodeId {
                    if it.next().unwrap() {
                        g.add_edge(u, v);
                    }
                }
            }
            g
        })
    })
}

/// A random graph, a connected anchored piece of it, and a smaller piece of that.
fn chain() -> impl Strategy<Value = (Graph, Graph, Graph)> {
    (graph(8), any::<u64>(), 1usize..=8, 1usize..=8).prop_map(|(host, seed, big, small)| {
        let mut rng = seeded(seed);
        let anchor = (seed % host.node_count() as u64) as NodeId;
        let c = grow_from(&host, anchor, host.node_count(), &mut rng).graph;
        let b = grow_from(&c, 0, big, &mut rng).graph;
        let a = grow_from(&b, 0, small, &mut rng).graph;
        (a, b, c)
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<NodeId>> {
    Just((0..n as NodeId).collect::<Vec<_>>()).prop_shuffle()
}

fn sub(a: &Graph, b: &Graph) -> bool {
    is_anchored_subgraph(a, b).unwrap().is_some()
}

/// Anchored frequency by trying every injection of the query.
fn brute_anchored(q: &Graph, t: &Graph) -> u64 {
    let qa = q.anchor().unwrap();
    t.nodes().filter(|&u| injections(q, t).any(|f| f[qa as usize] == u)).count() as u64
}

/// Distinct node sets of `t` inducing a copy of `q`.
fn brute_graph_level(q: &Graph, t: &Graph) -> u128 {
    let mut sets: Vec<Vec<NodeId>> = injections(q, t)
        .map(|mut f| {
            f.sort_unstable();
            f
        })
        .collect();
    sets.sort();
    sets.dedup();
    sets.len() as u128
}

fn injections<'a>(q: &'a Graph, t: &'a Graph) -> impl Iterator<Item = Vec<NodeId>> + 'a {
    let (k, n) = (q.node_count(), t.node_count());
    let mut all = Vec::new();
    let mut f: Vec<NodeId> = Vec::with_capacity(k);
    fn rec(q: &Graph, t: &Graph, n: usize, f: &mut Vec<NodeId>, all: &mut Vec<Vec<NodeId>>) {
        let i = f.len();
        if i == q.node_count() {
            all.push(f.clone());
            return;
        }
        for v in 0..n as NodeId {
            if f.contains(&v) {
                continue;
            }
            if (0..i).all(|j| q.has_edge(i as NodeId, j as NodeId) == t.has_edge(v, f[j])) {
                f.push(v);
                rec(q, t, n, f, all);
                f.pop();
            }
        }
    }
    if k <= n {
        rec(q, t, n, &mut f, &mut all);
    }
    all.into_iter()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn subgraph_relation_is_transitive((a, b, c) in chain(), (x, y, z) in chain()) {
        for (p, q, r) in [(&a, &b, &c), (&x, &b, &c), (&a, &y, &z), (&x, &b, &z)] {
            if sub(p, q) && sub(q, r) {
                prop_assert!(sub(p, r));
            }
        }
    }

    #[test]
    fn subgraph_relation_is_antisymmetric((a, b, _) in chain(), perm in permutation(8)) {
        let perm: Vec<NodeId> = perm.into_iter().filter(|&p| (p as usize) < b.node_count()).collect();
        let b2 = b.permuted(&perm);
        prop_assert!(sub(&b, &b2) && sub(&b2, &b));
        prop_assert!(exact_isomorphic(&b, &b2));
        if sub(&a, &b) && sub(&b, &a) {
            prop_assert!(exact_isomorphic(&a, &b));
        }
    }

    #[test]
    fn frequencies_are_anti_monotone((a, b, _) in chain(), t in graph(9)) {
        prop_assert!(sub(&a, &b));
        prop_assert!(anchored_frequency(&a, &t).unwrap() >= anchored_frequency(&b, &t).unwrap());
    }

    #[test]
    fn counters_match_brute_force((q, _, _) in chain(), t in graph(7)) {
        prop_assume!(q.node_count() <= 5);
        prop_assert_eq!(anchored_frequency(&q, &t).unwrap(), brute_anchored(&q, &t));
        prop_assert_eq!(graph_level_frequency(&q, &t).unwrap(), brute_graph_level(&q, &t));
    }

    #[test]
    fn canonical_key_is_permutation_invariant(g in graph(12), seed in any::<u64>()) {
        let mut order: Vec<NodeId> = g.nodes().collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut seeded(seed));
        prop_assert_eq!(canonical_key(&g), canonical_key(&g.permuted(&order)));
        if g.node_count() > 0 {
            let anchored = g.clone().with_anchor(0).unwrap();
            prop_assert_eq!(canonical_key(&anchored), canonical_key(&anchored.permuted(&order)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_enumeration_matches_naive(t in graph(10), k in 1usize..=5) {
        prop_assert!(enumerate_exact(&t, k, true).unwrap().agrees_with(&enumerate_naive(&t, k).unwrap()));
    }

    #[test]
    fn rand_esu_with_unit_probabilities_is_exact(t in graph(9), k in 2usize..=4, seed in any::<u64>()) {
        let est = mine_rand_esu(&t, k, 1e-300, &mut seeded(seed)).unwrap();
        prop_assert!(est.agrees_with(&enumerate_exact(&t, k, false).unwrap()));
    }

    #[test]
    fn perfect_embedding_grows_monotonically(host in graph(10), seed in any::<u64>()) {
        let pe = PerfectEmbedding::build(4).unwrap();
        let mut rng = seeded(seed);
        let anchor = (seed % host.node_count() as u64) as NodeId;
        let full = grow_from(&host, anchor, host.node_count(), &mut rng);
        let mut prev: Option<Vec<f64>> = None;
        for size in 1..=full.nodes.len() {
            let g = full.graph.induced_subgraph(&(0..size as NodeId).collect::<Vec<_>>());
            let z = pe.embed(&g).unwrap();
            if let Some(p) = &prev {
                prop_assert!(dominated(p, &z));
            }
            prev = Some(z);
        }
    }

    #[test]
    fn encoder_is_permutation_invariant_and_non_negative((_, b, _) in chain(), seed in any::<u64>()) {
        let model = EncoderModel::new(EncoderConfig { hidden: 6, layers: 3, mlp_layers: 2, dim: 5 }, 9).unwrap();
        let mut order: Vec<NodeId> = b.nodes().collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut seeded(seed));
        let z = model.embed(&b).unwrap();
        let w = model.embed(&b.permuted(&order)).unwrap();
        prop_assert!(z.iter().all(|&x| x >= 0.0));
        for (x, y) in z.iter().zip(&w) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn hit_rate_is_a_fraction(pred in proptest::collection::vec(0u8..12, 0..12), truth in proptest::collection::vec(0u64..5, 1..12), r in 1usize..12) {
        prop_assume!(r <= truth.len());
        let truth: Vec<(u8, u64)> = truth.into_iter().enumerate().map(|(i, f)| (i as u8, f)).collect();
        let h = hit_rate(&pred, &truth, r, |a, b| a == b).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), family in prop_oneof![
        Just(Family::ErdosRenyi), Just(Family::ExtendedBarabasiAlbert), Just(Family::PowerLawCluster),
        Just(Family::WattsStrogatz), Just(Family::Mixed)
    ]) {
        let cfg = GeneratorConfig::new(family, (5, 15), seed).unwrap();
        prop_assert_eq!(cfg.dataset(4).unwrap(), cfg.dataset(4).unwrap());
    }
}
