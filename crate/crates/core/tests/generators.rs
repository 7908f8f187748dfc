use aumann_core::generators::{
    gen_density, gen_dovm, gen_event, gen_model, gen_partition, gen_planted_scenario,
    gen_polyhedral_svm, gen_povm, gen_random_scenario, GenParams, GptCone, Layer, Seed,
};
use aumann_core::{ConeKind, Dovm, KnowledgeModel, Measure, Partition, Povm, Svm};

const LAYERS: [Layer; 5] = [
    Layer::Classical,
    Layer::Quantum,
    Layer::Gpt(GptCone::Simplex),
    Layer::Gpt(GptCone::Psd),
    Layer::Gpt(GptCone::Polyhedral),
];

fn params(n_worlds: usize, n_agents: usize, dim: usize) -> GenParams {
    GenParams {
        n_worlds,
        n_agents,
        dim,
    }
}

#[test]
fn partition_golden_seed_42() {
    let p = gen_partition(Seed(42), 4, 2).unwrap();
    let cells: Vec<Vec<usize>> = p.cells().iter().map(|c| c.iter().collect()).collect();
    assert_eq!(cells, vec![vec![0, 2], vec![1, 3]]);
}

#[test]
fn density_golden_seed_42() {
    let rho = gen_density(Seed(42), 2).unwrap();
    let expected = [
        [[0.5975780308309424, 0.0], [0.03647999302945793, 0.17048671029774629]],
        [[0.03647999302945793, -0.17048671029774629], [0.4024219691690575, 0.0]],
    ];
    let pairs = rho.matrix().to_pairs();
    for (row, exp) in pairs.iter().zip(&expected) {
        assert_eq!(row.as_slice(), exp.as_slice());
    }
}

#[test]
fn dovm_golden_seed_42() {
    let model = KnowledgeModel::new(2, vec![Partition::trivial(2)]).unwrap();
    let rho = gen_dovm(Seed(42), &model, 2).unwrap();
    let expected = [
        [
            [[0.021497376947793738, 0.0], [-0.0422019994730833, -0.050776083612299266]],
            [[-0.0422019994730833, 0.050776083612299266], [0.4131920508111346, 0.0]],
        ],
        [
            [[0.0667853491730265, 0.0], [-0.06350951552233802, -0.11893450534883153]],
            [[-0.06350951552233802, 0.11893450534883153], [0.4985252230680439, 0.0]],
        ],
    ];
    for (atom, exp) in rho.atoms().iter().zip(&expected) {
        let pairs = atom.to_pairs();
        for (row, e) in pairs.iter().zip(exp) {
            assert_eq!(row.as_slice(), e.as_slice());
        }
    }
}

#[test]
fn identical_seeds_give_identical_objects() {
    for s in 0..50 {
        assert_eq!(gen_partition(Seed(s), 7, 4).unwrap(), gen_partition(Seed(s), 7, 4).unwrap());
        assert_eq!(gen_model(Seed(s), 6, 3).unwrap(), gen_model(Seed(s), 6, 3).unwrap());
        assert_eq!(gen_event(Seed(s), 9), gen_event(Seed(s), 9));
        assert_eq!(gen_povm(Seed(s), 3, 2).unwrap(), gen_povm(Seed(s), 3, 2).unwrap());
        for layer in LAYERS {
            let p = params(5, 2, 3);
            assert_eq!(
                gen_planted_scenario(Seed(s), layer, p).unwrap(),
                gen_planted_scenario(Seed(s), layer, p).unwrap()
            );
            assert_eq!(
                gen_random_scenario(Seed(s), layer, p).unwrap(),
                gen_random_scenario(Seed(s), layer, p).unwrap()
            );
        }
    }
}

#[test]
fn generated_objects_pass_their_invariants() {
    for s in 0..200 {
        let model = gen_model(Seed(s), 8, 3).unwrap();
        for p in model.partitions() {
            assert!(Partition::new(8, p.cells().to_vec()).is_ok());
        }
        let rho = gen_dovm(Seed(s), &model, 3).unwrap();
        assert!(Dovm::new(rho.atoms().to_vec()).is_ok());
        let povm = gen_povm(Seed(s), 4, 3).unwrap();
        assert!(Povm::new(povm.effects().to_vec()).is_ok());
        let svm = gen_polyhedral_svm(Seed(s), 5, 4).unwrap();
        assert!(Svm::new(svm.cone().clone(), svm.atoms().to_vec()).is_ok());
        let ConeKind::Polyhedral { generators } = svm.cone().kind() else {
            panic!("polyhedral cone expected")
        };
        assert!((4..=8).contains(&generators.len()));
    }
}

#[test]
fn planted_bundles_have_consistent_layers() {
    for s in 0..100 {
        for layer in LAYERS {
            let b = gen_planted_scenario(Seed(s), layer, params(6, 3, 2)).unwrap();
            let inst = &b.instance;
            match (layer, &inst.measure) {
                (Layer::Classical, Measure::Classical(_)) | (Layer::Quantum, Measure::Quantum(_)) => {}
                (Layer::Gpt(cone), Measure::Gpt(svm)) => match (cone, svm.cone().kind()) {
                    (GptCone::Simplex, ConeKind::Simplex)
                    | (GptCone::Psd, ConeKind::PsdCone { .. })
                    | (GptCone::Polyhedral, ConeKind::Polyhedral { .. }) => {}
                    other => panic!("{other:?}"),
                },
                other => panic!("{other:?}"),
            }
            let m0 = b.planted_cell.unwrap();
            assert!(inst.model.meet_partition().cells().contains(&m0));
            assert!(inst.mass(&m0).unwrap() > 0.0);
        }
    }
}

#[test]
fn single_world_scenarios_are_rejected() {
    for layer in LAYERS {
        assert!(gen_planted_scenario(Seed(0), layer, params(1, 1, 2)).is_err());
    }
}
