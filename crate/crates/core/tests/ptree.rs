use icrt_core::paths::validate_theta;
use icrt_core::ptree::{
    build_breadth, build_depth, check_claim, check_clhp, check_deprop, check_f2r, check_keyg, classical_exploration,
    make_particular_pseq, sample_positions, sample_ptree, Construction, PSeq,
};
use icrt_core::RngState;
use proptest::prelude::*;

fn figure_theta() -> icrt_core::Theta {
    validate_theta(0.862, &[0.345, 0.302, 0.216]).unwrap()
}

fn random_pseq(weights: &[f64]) -> PSeq {
    let total: f64 = weights.iter().sum();
    PSeq::from_unranked(weights.iter().map(|w| w / total).collect(), 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructions_give_valid_trees(
        weights in prop::collection::vec(0.01f64..1.0, 1..300),
        seed in any::<u64>(),
        depth_first in any::<bool>(),
    ) {
        let p = random_pseq(&weights);
        let construction = if depth_first { Construction::Depth } else { Construction::Breadth };
        let real = sample_ptree(&p, construction, &mut RngState::new(seed, 0).rng());
        let t = &real.tree;
        prop_assert!(t.validate().is_ok());
        prop_assert_eq!(t.n(), p.len());
        prop_assert_eq!(t.parent[t.root], t.root);
        let mut seen = vec![false; t.n()];
        for &v in &t.dfs_order {
            if v != t.root {
                prop_assert!(seen[t.parent[v]], "vertex {} before its parent", v);
            }
            seen[v] = true;
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn exploration_steps_up_by_one(
        weights in prop::collection::vec(0.01f64..1.0, 2..200),
        seed in any::<u64>(),
    ) {
        let p = random_pseq(&weights);
        let real = sample_ptree(&p, Construction::Depth, &mut RngState::new(seed, 1).rng());
        let h = classical_exploration(&real.tree);
        for k in h.knots() {
            prop_assert!(k.left >= 0.0 && k.left.fract() == 0.0);
            let step = k.right - k.left;
            prop_assert!(step <= 1.0, "step {}", step);
        }
    }

    #[test]
    fn exact_identities_on_random_p(
        weights in prop::collection::vec(0.01f64..1.0, 1..100),
        seed in any::<u64>(),
    ) {
        let p = random_pseq(&weights);
        let x = sample_positions(p.len(), &mut RngState::new(seed, 2).rng());
        let real = build_depth(&p, &x);
        // a near-tie of the circle minimum is rejected, not mis-built
        if let Ok(real) = real {
            prop_assert!(check_deprop(&real.tree, real.fexc(), &p).passes());
            prop_assert!(check_clhp(&real.tree, &p).passes());
        }
        if let Ok(real) = build_breadth(&p, &x) {
            prop_assert!(check_claim(&real, &p).passes());
            prop_assert!(check_f2r(&real.tree, real.fexc(), &p).passes());
        }
    }
}

#[test]
fn identities_at_n_1000() {
    let theta = figure_theta();
    for (k, p) in [PSeq::uniform(1000), make_particular_pseq(&theta, 1000)].into_iter().enumerate() {
        for seed in 0..5 {
            let mut rng = RngState::new(seed, 10 + k as u64).rng();
            let real = sample_ptree(&p, Construction::Depth, &mut rng);
            for report in [check_deprop(&real.tree, real.fexc(), &p), check_clhp(&real.tree, &p)] {
                assert!(report.passes(), "{report:?}");
            }
            if let Some(report) = check_keyg(&real, &p) {
                assert!(report.passes(), "{report:?}");
            }
            let breadth = sample_ptree(&p, Construction::Breadth, &mut rng);
            for report in [check_claim(&breadth, &p), check_f2r(&breadth.tree, breadth.fexc(), &p)] {
                assert!(report.passes(), "{report:?}");
            }
        }
    }
}
