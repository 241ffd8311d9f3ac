//! Four-case classification of test samples from two probe models, and the
//! importance each case receives.
//!
//! Run with `cargo run --example classify_cases`.

use dataproxy::{
    assign_test_importance, classify_case, classify_outcomes, ImportanceConstants, ProbeOutcomeSet, SampleId,
};

fn main() -> dataproxy::Result<()> {
    println!("lower upper upper_better -> case");
    for bits in 0..8u8 {
        let (lower, upper, better) = (bits & 1 == 1, bits & 2 == 2, bits & 4 == 4);
        println!("{lower:>5} {upper:>5} {better:>12} -> {:?}", classify_case(lower, upper, better));
    }

    let ids: Vec<SampleId> = (0..6).map(|i| SampleId::new(format!("test-{i}"))).collect::<Result<_, _>>()?;
    let lower = vec![true, false, true, false, true, false];
    let upper = vec![true, false, false, true, true, true];
    let outcomes = ProbeOutcomeSet::from_flags(
        vec!["small".into(), "large".into()],
        "small",
        "large",
        ids,
        vec![lower, upper],
    )?;
    println!("\nprobe accuracies: {:?}", outcomes.accuracies());

    let constants: ImportanceConstants = "2,1,6,1".parse()?;
    let table = assign_test_importance(&outcomes, &constants)?;
    for ((id, case), v) in outcomes.test_ids().iter().zip(classify_outcomes(&outcomes)).zip(table.values()) {
        println!("{id:<8} {case:?} importance {v}");
    }
    Ok(())
}
