// Stratified and repeated k-fold assignments for a labeled evaluation set.

use std::error::Error;

use darkcorpus::folds::{repeated_kfold, stratified_kfold};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // 249 positives and 1,624 negatives.
    let labels: Vec<&str> = std::iter::repeat_n("pos", 249).chain(std::iter::repeat_n("neg", 1624)).collect();

    let a = stratified_kfold(&labels, 5, 42)?;
    println!("fold sizes: {:?}", a.fold_sizes());
    for (label, counts) in a.class_counts(&labels) {
        println!("{label}: {counts:?}");
    }
    println!("fold 0 test split starts with {:?}", &a.test_indices(0)[..5]);

    for rep in repeated_kfold(&labels, 5, 3, 42)? {
        println!("repetition {} (seed {:#x}): positives {:?}", rep.repetition, rep.seed, rep.class_counts(&labels)["pos"]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
