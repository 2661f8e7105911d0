// timing probe for the bound pipeline
use std::time::Instant;
use qmoments::engine::{build_moment_tables, BuiltinOperator, OperatorSpec};

fn main() {
    let specs: Vec<OperatorSpec> = [BuiltinOperator::Phi2, BuiltinOperator::PhiDot2]
        .iter()
        .map(|&op| OperatorSpec::builtin(op))
        .collect();
    let t0 = Instant::now();
    let tables = build_moment_tables(&specs, 65).unwrap();
    println!("tables in {:?}", t0.elapsed());
    for t in &tables {
        let name = t.spec().name().to_string();
        let t1 = Instant::now();
        let seq = qmoments::analysis::bound_sequence(t, 2, 33, 40).unwrap();
        println!("{name}: y_2..y_33 in {:?}; y32 = {}", t1.elapsed(),
            seq.get(32).unwrap().format_fixed(11));
    }
}
