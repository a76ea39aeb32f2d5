use proptest::prelude::*;

use ranksig_core::siggraph::{build_graph, cluster, rank_groups, weak_components, Criterion};
use ranksig_core::stats::{link_z, ProportionMode};
use ranksig_core::InstitutionRecord;

fn records(max: usize) -> impl Strategy<Value = Vec<InstitutionRecord>> {
    prop::collection::vec((200.0..20_000.0f64, 0.05..0.2f64), 2..max).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (p, s))| {
                let p = p.round();
                let t = (p * s).round();
                let lo = (s - 1.96 * (s * (1.0 - s) / p).sqrt()).max(0.0);
                let hi = (s + 1.96 * (s * (1.0 - s) / p).sqrt()).min(1.0);
                InstitutionRecord::from_counts(format!("inst-{i:03}"), p, t).with_interval(lo.min(t / p), hi.max(t / p))
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn input_order_does_not_matter(recs in records(40), perm in Just(()).prop_perturb(|_, mut rng| rng.random::<u64>())) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = recs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm));
        for criterion in [Criterion::ZTest, Criterion::CiOverlap] {
            let g1 = build_graph(&recs, criterion, 2.576, ProportionMode::Stored).unwrap();
            let g2 = build_graph(&shuffled, criterion, 2.576, ProportionMode::Stored).unwrap();
            prop_assert_eq!(&g1, &g2);
            let (w1, w2) = (weak_components(&g1), weak_components(&g2));
            prop_assert_eq!(&w1, &w2);
            prop_assert_eq!(rank_groups(&g1, &w1), rank_groups(&g2, &w2));
            prop_assert_eq!(cluster(&g1, 1.0, 5), cluster(&g2, 1.0, 5));
        }
    }

    #[test]
    fn separate_components_are_significant(recs in records(50), threshold in prop_oneof![Just(1.96), Just(2.576), Just(3.29)]) {
        let g = build_graph(&recs, Criterion::ZTest, threshold, ProportionMode::Stored).unwrap();
        let wc = weak_components(&g);
        let by_name = |n: &str| recs.iter().find(|r| r.name == n).unwrap();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if wc.group_of(i) != wc.group_of(j) {
                    let z = link_z(by_name(&g.nodes()[i].name), by_name(&g.nodes()[j].name), ProportionMode::Stored).unwrap();
                    prop_assert!(z.abs() >= threshold);
                }
            }
        }
    }

    #[test]
    fn raising_threshold_only_adds_edges(recs in records(40), t1 in 0.5..4.0f64, dt in 0.0..3.0f64) {
        let lo = build_graph(&recs, Criterion::ZTest, t1, ProportionMode::Stored).unwrap();
        let hi = build_graph(&recs, Criterion::ZTest, t1 + dt, ProportionMode::Stored).unwrap();
        for e in lo.edges() {
            prop_assert!(hi.has_edge(&lo.nodes()[e.a].name, &lo.nodes()[e.b].name));
        }
        prop_assert!(weak_components(&lo).refines(&weak_components(&hi)));
    }

    #[test]
    fn clusters_stay_inside_components(recs in records(50), seed in any::<u64>(), resolution in 0.2..2.0f64) {
        let g = build_graph(&recs, Criterion::ZTest, 2.576, ProportionMode::Stored).unwrap();
        let wc = weak_components(&g);
        let c = cluster(&g, resolution, seed);
        prop_assert!(c.refines(&wc));
        for i in wc.isolates() {
            prop_assert!(c.groups()[c.group_of(i)].isolate);
        }
    }
}
