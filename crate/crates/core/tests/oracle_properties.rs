//! Change-program properties checked against exhaustive enumeration.

use cqa_core::compiler::{build_change_program, RepairMode, StabilizerPolicy};
use cqa_core::cqa::project_repair;
use cqa_core::grounder::{ground, DomainDeclaration};
use cqa_core::oracle::{
    change_encoding, consistent_instances, enumerate_repairs_bruteforce, is_model, oracle_domain, random_problem,
    satisfies, BicKind, CorpusShape, Metric,
};
use cqa_core::solver::{answer_sets, SolveOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const INSTANCES: usize = 60;

const KINDS: [BicKind; 5] = [
    BicKind::FunctionalDependency,
    BicKind::Inclusion,
    BicKind::Range,
    BicKind::Exclusion,
    BicKind::Insertion,
];

fn small() -> CorpusShape {
    CorpusShape {
        max_predicates: 2,
        max_constants: 2,
        max_constraints: 3,
        fact_probability: 0.5,
    }
}

#[test]
fn encoding_of_every_consistent_instance_is_a_change_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..INSTANCES {
        let (r, ics, facts, text) = random_problem(&mut rng, small(), &KINDS).unwrap();
        let change = build_change_program(&ics.constraints, &r.schema, StabilizerPolicy::Guarded).unwrap();
        let g = ground(&change, &DomainDeclaration::Active, &r).unwrap();
        for r2 in consistent_instances(&r, &ics.constraints, None, 12).unwrap() {
            let s = change_encoding(&g, &r2);
            assert!(is_model(&g, &s), "facts {facts:?} ics {text:?} consistent {r2:?}");
            checked += 1;
        }
    }
    assert!(checked > INSTANCES);
}

#[test]
fn change_answer_sets_below_a_repair_encode_it() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut inside = 0;
    for _ in 0..INSTANCES {
        let (r, ics, facts, text) = random_problem(&mut rng, small(), &KINDS).unwrap();
        let change = build_change_program(&ics.constraints, &r.schema, StabilizerPolicy::Guarded).unwrap();
        let g = ground(&change, &DomainDeclaration::Active, &r).unwrap();
        let sets = match answer_sets(&g, &SolveOptions::default()) {
            Ok(sets) => sets,
            Err(cqa_core::Error::Inconsistent) => continue,
            Err(e) => panic!("{e}"),
        };
        for rep in enumerate_repairs_bruteforce(&r, &ics, None, Metric::SetInclusion).unwrap() {
            let s = change_encoding(&g, &rep.instance);
            for a in sets.iter().filter(|a| a.literals().is_subset(&s)) {
                let i = project_repair(a, &r, RepairMode::Dalal).unwrap();
                assert_eq!(i.instance, rep.instance, "facts {facts:?} ics {text:?}");
                inside += 1;
            }
        }
    }
    assert!(
        inside > INSTANCES / 2,
        "only {inside} answer sets below a repair encoding"
    );
}

#[test]
fn change_models_project_to_consistent_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..INSTANCES {
        let (r, ics, facts, text) = random_problem(&mut rng, CorpusShape::default(), &KINDS).unwrap();
        let change = build_change_program(&ics.constraints, &r.schema, StabilizerPolicy::Guarded).unwrap();
        let g = ground(&change, &DomainDeclaration::Active, &r).unwrap();
        let Ok(sets) = answer_sets(&g, &SolveOptions::default()) else {
            continue;
        };
        let dom = oracle_domain(&r, &ics.constraints, None);
        for a in &sets {
            let i = project_repair(a, &r, RepairMode::Dalal).unwrap();
            assert!(
                satisfies(&i.instance, &ics.constraints, &dom).unwrap(),
                "facts {facts:?} ics {text:?} model {a:?}"
            );
        }
    }
}

#[test]
fn change_program_has_an_answer_set_for_satisfiable_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let kinds = [BicKind::FunctionalDependency, BicKind::Inclusion, BicKind::Exclusion];
    for _ in 0..INSTANCES {
        let (r, ics, facts, text) = random_problem(&mut rng, CorpusShape::default(), &kinds).unwrap();
        let change = build_change_program(&ics.constraints, &r.schema, StabilizerPolicy::Guarded).unwrap();
        let g = ground(&change, &DomainDeclaration::Active, &r).unwrap();
        let sets = answer_sets(&g, &SolveOptions::default()).unwrap();
        assert!(!sets.is_empty(), "facts {facts:?} ics {text:?}");
    }
}
