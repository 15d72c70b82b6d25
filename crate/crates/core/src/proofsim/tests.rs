use super::synth::{random_refutation, Shape, SynthConfig};
use super::*;
use crate::bphp::{cnf_to_inequalities, generate_bphp};
use crate::rng::seeded;

fn ineq(coeffs: &[i64], bound: i64) -> Inequality {
    Inequality::new(coeffs.to_vec(), bound)
}

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |mask| (0..n).map(|v| (mask >> v) & 1 == 1).collect())
}

fn assert_finds_violations(dt: &ThresholdDecisionTree, system: &LinearSystem) {
    dt.validate(system).unwrap();
    for a in assignments(system.num_vars) {
        let axiom = eval_dt(dt, system, &a);
        assert!(!system.rows[axiom].holds(&a), "axiom {axiom} holds on {a:?}");
    }
}

/// x >= 1, y >= 1, x + y <= 1, refuted by adding the first two.
fn cutting_planes_example() -> (LinearSystem, ProofTree) {
    let system = LinearSystem::new(2, vec![ineq(&[-1, 0], -1), ineq(&[0, -1], -1), ineq(&[1, 1], 1)]).unwrap();
    let proof = ProofTree {
        num_vars: 2,
        root: 0,
        nodes: vec![
            ProofNode { ineq: Inequality::contradiction(2), rule: Rule::Derived(vec![1, 4]) },
            ProofNode { ineq: ineq(&[-1, -1], -2), rule: Rule::Derived(vec![2, 3]) },
            ProofNode { ineq: ineq(&[-1, 0], -1), rule: Rule::Axiom(0) },
            ProofNode { ineq: ineq(&[0, -1], -1), rule: Rule::Axiom(1) },
            ProofNode { ineq: ineq(&[1, 1], 1), rule: Rule::Axiom(2) },
        ],
    };
    (system, proof)
}

#[test]
fn single_leaf_tree() {
    let system = LinearSystem::new(1, vec![Inequality::contradiction(1)]).unwrap();
    let dt = ThresholdDecisionTree { num_vars: 1, root: 0, nodes: vec![DtNode::Leaf { axiom: 0 }] };
    assert_eq!(dt.depth(), 0);
    assert_eq!(eval_dt(&dt, &system, &[true]), 0);
}

#[test]
fn query_false_branch() {
    let system = LinearSystem::new(1, vec![ineq(&[1], 0), ineq(&[-1], -1)]).unwrap();
    let dt = ThresholdDecisionTree {
        num_vars: 1,
        root: 0,
        nodes: vec![
            DtNode::Query { ineq: ineq(&[1], 0), if_true: 1, if_false: 2 },
            DtNode::Leaf { axiom: 1 },
            DtNode::Leaf { axiom: 0 },
        ],
    };
    assert_eq!(eval_dt(&dt, &system, &[true]), 0);
    assert_eq!(eval_dt(&dt, &system, &[false]), 1);
    assert_finds_violations(&dt, &system);
}

#[test]
fn trivial_trees() {
    let system = LinearSystem::new(0, vec![Inequality::contradiction(0)]).unwrap();
    assert_eq!(trivial_dt(&system).depth(), 1);

    let system = LinearSystem::new(2, vec![ineq(&[1, 0], 0), ineq(&[-1, 0], -1)]).unwrap();
    assert_finds_violations(&trivial_dt(&system), &system);

    let small = cnf_to_inequalities(&generate_bphp(2, 3).unwrap());
    let dt = trivial_dt(&small);
    assert_eq!(dt.depth(), 6);
    assert_finds_violations(&dt, &small);

    let big = cnf_to_inequalities(&generate_bphp(4, 5).unwrap());
    let dt = trivial_dt(&big);
    assert_eq!(dt.depth(), 40);
    assert_finds_violations(&dt, &big);
}

#[test]
fn malformed_trees_are_rejected() {
    let system = LinearSystem::new(1, vec![ineq(&[1], 0)]).unwrap();
    let shared_child = ThresholdDecisionTree {
        num_vars: 1,
        root: 0,
        nodes: vec![DtNode::Query { ineq: ineq(&[1], 0), if_true: 1, if_false: 1 }, DtNode::Leaf { axiom: 0 }],
    };
    assert!(shared_child.validate(&system).is_err());
    let missing_axiom = ThresholdDecisionTree { num_vars: 1, root: 0, nodes: vec![DtNode::Leaf { axiom: 4 }] };
    assert!(missing_axiom.validate(&system).is_err());
}

#[test]
fn cutting_planes_proof_converts() {
    let (system, proof) = cutting_planes_example();
    proof.check_soundness().unwrap();
    let dt = proof_to_dt(&proof, &system, Soundness::Check).unwrap();
    assert!(dt.depth() <= depth_bound(proof.size()));
    assert_finds_violations(&dt, &system);
}

#[test]
fn unsound_proof_is_rejected() {
    let (system, mut proof) = cutting_planes_example();
    // x + y <= 0 does not follow from x >= 1, y >= 1
    proof.nodes[1].ineq = ineq(&[1, 1], 0);
    assert!(matches!(proof_to_dt(&proof, &system, Soundness::Check), Err(Error::UnsoundProof(_))));
}

#[test]
fn non_tree_like_proof_is_rejected() {
    let (system, mut proof) = cutting_planes_example();
    proof.nodes[1].rule = Rule::Derived(vec![2, 2]);
    assert!(matches!(proof.validate_structure(&system), Err(Error::MalformedProof(_))));
}

#[test]
fn axiom_leaf_must_match_system() {
    let (system, mut proof) = cutting_planes_example();
    proof.nodes[4].ineq = ineq(&[1, 1], 2);
    assert!(proof.validate_structure(&system).is_err());
}

#[test]
fn single_axiom_contradiction() {
    let system = LinearSystem::new(1, vec![Inequality::contradiction(1)]).unwrap();
    let proof = ProofTree {
        num_vars: 1,
        root: 0,
        nodes: vec![ProofNode { ineq: Inequality::contradiction(1), rule: Rule::Axiom(0) }],
    };
    let dt = proof_to_dt(&proof, &system, Soundness::Check).unwrap();
    assert!(dt.depth() <= 1);
    assert_finds_violations(&dt, &system);
}

#[test]
fn balanced_seven_leaves() {
    let mut rng = seeded(70);
    let (system, proof) = random_refutation(SynthConfig::new(10, 7, Shape::Balanced), &mut rng).unwrap();
    assert_eq!(proof.size(), 7);
    let dt = proof_to_dt(&proof, &system, Soundness::Check).unwrap();
    assert!(dt.depth() <= 5, "depth {}", dt.depth());
    assert_finds_violations(&dt, &system);
}

#[test]
fn chain_eight_leaves_gets_shallower() {
    let mut rng = seeded(8);
    let (system, proof) = random_refutation(SynthConfig::new(8, 8, Shape::Chain), &mut rng).unwrap();
    assert_eq!(proof.size(), 8);
    let dt = proof_to_dt(&proof, &system, Soundness::Check).unwrap();
    assert!(dt.depth() <= 7 && dt.depth() < 8, "depth {}", dt.depth());
    assert_finds_violations(&dt, &system);
}

#[test]
fn depth_bound_values() {
    assert_eq!(depth_bound(1), 1);
    assert_eq!(depth_bound(2), 3);
    assert_eq!(depth_bound(7), 6);
    assert_eq!(depth_bound(8), 7);
    assert_eq!(depth_bound(64), 12);
}

#[test]
fn exact_gt_examples() {
    assert!(exact_gt(&[1, 2, 3], 6, 4, 4).unwrap().0);
    assert!(!exact_gt(&[0, 0, 0], -1, 4, 4).unwrap().0);
    assert_eq!(exact_gt(&[0, 0], 0, 4, 4).unwrap().1, 20);
    assert!(matches!(exact_gt(&[1 << 20, 0], 0, 4, 4), Err(Error::Overflow(_))));
    assert!(matches!(exact_gt(&[0, 0], 0, 40, 40), Err(Error::Overflow(_))));
}

#[test]
fn partitions() {
    let p = VariablePartition::even(7, 3).unwrap();
    assert_eq!(p.owner, vec![0, 0, 0, 1, 1, 2, 2]);
    assert_eq!(p.max_share(), 3);
    let spec: protocol::PartitionSpec = "even:3".parse().unwrap();
    assert_eq!(spec.resolve(7).unwrap(), p);
    assert!("odd:3".parse::<protocol::PartitionSpec>().is_err());
    assert!("even:0".parse::<protocol::PartitionSpec>().is_err());
    assert!(VariablePartition::new(2, vec![0, 2]).is_err());
}

#[test]
fn protocol_matches_tree_on_bphp() {
    let system = cnf_to_inequalities(&generate_bphp(2, 3).unwrap());
    let dt = trivial_dt(&system);
    let partition = VariablePartition::even(system.num_vars, 3).unwrap();
    let protocol = dt_to_protocol(&dt, &system, &partition, &ExactGt).unwrap();
    for a in assignments(system.num_vars) {
        let run = protocol.run(&a).unwrap();
        assert_eq!(run.axiom, eval_dt(&dt, &system, &a));
        assert!(run.violated);
        assert!(run.transcript.is_consistent());
        // one player per variable: w = 0, t = 0, ceil(log2 3) = 2 -> 3 bits each
        assert_eq!(run.transcript.total_bits(), run.queries as u64 * 3 * 3);
        assert_eq!(run.queries, dt.path(&a).0.len());
    }
}

#[test]
fn single_player_still_pays() {
    let (system, proof) = cutting_planes_example();
    let dt = proof_to_dt(&proof, &system, Soundness::Check).unwrap();
    let partition = VariablePartition::even(2, 1).unwrap();
    let protocol = dt_to_protocol(&dt, &system, &partition, &ExactGt).unwrap();
    let run = protocol.run(&[true, true]).unwrap();
    assert!(run.queries > 0);
    assert!(run.transcript.total_bits() > 0);
}

#[test]
fn protocol_rejects_mismatched_partition() {
    let system = cnf_to_inequalities(&generate_bphp(2, 3).unwrap());
    let dt = trivial_dt(&system);
    let partition = VariablePartition::even(4, 2).unwrap();
    assert!(dt_to_protocol(&dt, &system, &partition, &ExactGt).is_err());
}

#[test]
fn random_refutations_convert_correctly() {
    let mut rng = seeded(2024);
    for trial in 0..30 {
        let leaves = 2 + trial * 2;
        let vars = 6 + trial % 5;
        let (system, proof) = random_refutation(SynthConfig::new(vars, leaves, Shape::Random), &mut rng).unwrap();
        let dt = proof_to_dt(&proof, &system, Soundness::Check).unwrap();
        assert!(dt.depth() <= depth_bound(proof.size()));
        assert_finds_violations(&dt, &system);
    }
}
