use concordance_core::{load_ledger, Error, Fact, FactKind, FactValue, Ledger, Prime, SignedAtom};
use proptest::prelude::*;

#[test]
fn seed_round_trips_through_json() {
    let seed = Ledger::seed();
    let again: Ledger = seed.to_json().parse().unwrap();
    assert_eq!(again.to_json(), seed.to_json());
    assert_eq!(again.facts(), seed.facts());
}

#[test]
fn loads_from_disk() {
    let dir = std::env::temp_dir().join(format!("ledger-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("seed.json");
    Ledger::seed().write(&path).unwrap();
    let l = load_ledger(&path).unwrap();
    assert_eq!(l.facts().len(), Ledger::seed().facts().len());
    assert!(matches!(load_ledger(dir.join("missing.json")), Err(Error::Io(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn rejects_contradictions() {
    let seed = Ledger::seed();
    let fact = |kind, value| Fact {
        knot: SignedAtom::positive("T(2,3)"),
        kind,
        value,
        provenance: "test".into(),
    };
    // Wrong signature for a knot with a Seifert matrix.
    let l = seed.without_fact(0).unwrap();
    assert!(l.with_fact(fact(FactKind::Sigma, FactValue::Int(-4))).is_err());
    // Slice knots have vanishing invariants.
    assert!(seed.with_fact(fact(FactKind::Slice, FactValue::Bool(true))).is_err());
    // σ^(3) must be divisible by 4.
    let odd = Fact {
        knot: SignedAtom::positive("9_42"),
        kind: FactKind::SigmaQ(Prime::THREE),
        value: FactValue::Int(2),
        provenance: "test".into(),
    };
    assert!(seed.with_fact(odd).is_err());
}

#[test]
fn mirror_lookups() {
    let seed = Ledger::seed();
    let k = SignedAtom::parse("-T(2,5)").unwrap();
    assert_eq!(seed.int(&k, FactKind::Sigma).unwrap().0, 4);
    assert_eq!(seed.int(&k, FactKind::G4).unwrap().0, 2);
    assert_eq!(seed.sigma_q(&k, Prime::THREE).unwrap().unwrap().0, 8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn removing_facts_keeps_a_valid_round_trip(
        drop in prop::sample::subsequence((0..Ledger::seed().facts().len()).collect::<Vec<_>>(), 0..6)
    ) {
        let mut l = Ledger::seed();
        for &i in drop.iter().rev() {
            match l.without_fact(i) {
                Ok(next) => l = next,
                Err(_) => return Ok(()),
            }
        }
        let again: Ledger = l.to_json().parse().unwrap();
        prop_assert_eq!(again.facts(), l.facts());
        prop_assert_eq!(again.relations(), l.relations());
    }

    #[test]
    fn garbage_never_panics(s in "\\PC{0,64}") {
        let _ = s.parse::<Ledger>();
    }
}
