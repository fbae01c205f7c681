//! Property tests across the pipeline: structural invariants of generated
//! networks, algebraic invariances of the DV-Hop estimates, and the
//! connectivity-consistency coverage guarantee.

use dcc_dvhop::net::{
    build_adjacency, generate_topology, hop_matrix, predicted_hops, Hop, MaskParams, Network,
    Point, Topology, DEFAULT_REGION,
};
use dcc_dvhop::objectives::{ac_cc, hop_loss, Candidate, HopLossKind};
use dcc_dvhop::{avg_hop_distance, estimate_distances};
use proptest::prelude::*;

fn topology_strategy() -> impl Strategy<Value = Topology> {
    prop_oneof![
        Just(Topology::Random),
        Just(Topology::CShaped),
        Just(Topology::OShaped),
        Just(Topology::XShaped),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_networks_satisfy_structural_invariants(
        topology in topology_strategy(),
        total in 10_usize..40,
        anchor_frac in 0.1_f64..0.5,
        radius in 25.0_f64..60.0,
        seed in 0_u64..10_000,
    ) {
        let anchors = ((total as f64 * anchor_frac) as usize).max(1);
        let net = match generate_topology(topology, total, anchors, radius, seed) {
            Ok(net) => net,
            Err(_) => return Ok(()), // sparse draws may exhaust the retry budget
        };
        let mask = MaskParams::default();
        for p in net.positions() {
            prop_assert!(mask.admits(topology, *p, net.region()));
        }

        let adj = build_adjacency(&net);
        let hops = hop_matrix(&adj);
        for i in 0..net.len() {
            prop_assert!(!adj.connected(i, i));
            prop_assert_eq!(hops.hop(i, i), Hop::Finite(0));
            for j in 0..net.len() {
                prop_assert_eq!(adj.connected(i, j), adj.connected(j, i));
                prop_assert_eq!(hops.hop(i, j), hops.hop(j, i));
                prop_assert_eq!(hops.hop(i, j) == Hop::Finite(1), i != j && adj.connected(i, j));
            }
        }
    }

    #[test]
    fn generation_is_reproducible(
        topology in topology_strategy(),
        seed in 0_u64..10_000,
    ) {
        let a = generate_topology(topology, 20, 4, 30.0, seed);
        let b = generate_topology(topology, 20, 4, 30.0, seed);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn network_text_round_trips(
        topology in topology_strategy(),
        seed in 0_u64..10_000,
    ) {
        if let Ok(net) = generate_topology(topology, 15, 3, 35.0, seed) {
            let parsed = Network::from_text(&net.to_text()).unwrap();
            prop_assert_eq!(net, parsed);
        }
    }

    #[test]
    fn avg_dis_invariant_under_anchor_relabeling(
        seed in 0_u64..5_000,
        swap_a in 0_usize..6,
        swap_b in 0_usize..6,
    ) {
        let net = generate_topology(Topology::Random, 25, 6, 30.0, seed).unwrap();
        let hops = hop_matrix(&build_adjacency(&net));
        let avg = avg_hop_distance(&net, &hops).unwrap();

        let mut positions = net.positions().to_vec();
        positions.swap(swap_a, swap_b);
        let relabeled = Network::from_parts(
            positions, 6, net.radius(), net.region(), net.topology(), net.seed(),
        ).unwrap();
        let hops2 = hop_matrix(&build_adjacency(&relabeled));
        let avg2 = avg_hop_distance(&relabeled, &hops2).unwrap();

        let mut expected = avg.clone();
        expected.swap(swap_a, swap_b);
        for (e, g) in expected.iter().zip(&avg2) {
            prop_assert!((e - g).abs() <= 1e-9 * e.abs().max(1.0));
        }
    }

    #[test]
    fn estimates_scale_linearly_with_geometry(
        seed in 0_u64..5_000,
        scale in 0.5_f64..3.0,
    ) {
        let net = generate_topology(Topology::Random, 20, 5, 30.0, seed).unwrap();
        let hops = hop_matrix(&build_adjacency(&net));
        let avg = avg_hop_distance(&net, &hops).unwrap();
        let est = estimate_distances(&avg, &hops, &net);

        // Scale positions, radius and region together: hop counts are
        // unchanged, distances scale by `scale`.
        let positions: Vec<Point> = net
            .positions()
            .iter()
            .map(|p| Point::new(p.x * scale, p.y * scale))
            .collect();
        let scaled = Network::from_parts(
            positions,
            net.anchor_count(),
            net.radius() * scale,
            net.region() * scale,
            net.topology(),
            net.seed(),
        ).unwrap();
        let scaled_hops = hop_matrix(&build_adjacency(&scaled));
        prop_assert_eq!(&hops, &scaled_hops);

        let scaled_avg = avg_hop_distance(&scaled, &scaled_hops).unwrap();
        for (a, b) in avg.iter().zip(&scaled_avg) {
            prop_assert!((a * scale - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
        let scaled_est = estimate_distances(&scaled_avg, &scaled_hops, &scaled);
        for a in 0..net.anchor_count() {
            for k in 0..net.unknown_count() {
                match (est.distance(a, k), scaled_est.distance(a, k)) {
                    (Some(d), Some(s)) => {
                        prop_assert!((d * scale - s).abs() <= 1e-9 * s.abs().max(1.0));
                    }
                    (None, None) => {}
                    (d, s) => prop_assert!(false, "sentinel mismatch: {:?} vs {:?}", d, s),
                }
            }
        }
    }

    #[test]
    fn hop_mismatch_always_activates_some_pair(
        n in 3_usize..8,
        seed in 0_u64..50_000,
    ) {
        // The coverage guarantee behind the connectivity-consistency
        // activation, sampled over arbitrary (possibly disconnected)
        // geometries.
        let mut rng = rand::SeedableRng::seed_from_u64(seed);
        let rng: &mut rand_chacha::ChaCha8Rng = &mut rng;
        use rand::Rng;
        let radius = rng.random_range(8.0..120.0);
        let positions: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
            .collect();
        let net = Network::from_parts(positions, 1, radius, DEFAULT_REGION, Topology::Random, 0)
            .unwrap();
        let real = hop_matrix(&build_adjacency(&net));
        let coords: Vec<f64> = (0..2 * (n - 1)).map(|_| rng.random_range(0.0..100.0)).collect();
        let candidate = Candidate::new(coords);
        let pred = predicted_hops(&candidate, &net).unwrap();
        let positions = net.positions_with_candidate(&candidate).unwrap();

        let mismatch = (0..n).any(|i| (0..n).any(|j| i != j && real.hop(i, j) != pred.hop(i, j)));
        if mismatch {
            let activated = (0..n).any(|i| (0..n).any(|j| {
                i != j && ac_cc(real.hop(i, j), positions[i].dist(positions[j]), radius)
            }));
            prop_assert!(activated);
        }
    }

    #[test]
    fn zero_dcc_loss_implies_exact_hop_matrix(
        seed in 0_u64..5_000,
        sigma in 0.0_f64..2.0,
    ) {
        // Contrapositive of the coverage guarantee. Jittered ground truths
        // sometimes keep every pair consistent; whenever the loss is zero
        // the predicted hop matrix must equal the real one (random geometry
        // never lands exactly on the radius boundary).
        let net = generate_topology(Topology::Random, 15, 4, 30.0, seed).unwrap();
        let real = hop_matrix(&build_adjacency(&net));
        let mut rng: rand_chacha::ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed ^ 0xABCD);
        use rand::Rng;
        let mut candidate = net.ground_truth_candidate();
        for v in candidate.coords_mut() {
            *v = (*v + rng.random_range(-sigma..=sigma)).clamp(0.0, net.region());
        }
        let loss = hop_loss(HopLossKind::Dcc, &net, &real, &candidate).unwrap();
        if loss == 0.0 {
            let pred = predicted_hops(&candidate, &net).unwrap();
            prop_assert_eq!(real, pred);
        }
    }
}
