//! Parses, checks and runs a small MiniJ program with its tests.

use faultinject::minij::{parse, run_tests, unparse_unit, Program, StepBudget};

const SOURCE: &str = r#"
int fib(int n) {
    int a = 0;
    int b = 1;
    while (n > 0) {
        int t = a + b;
        a = b;
        b = t;
        n--;
    }
    return a;
}

float mean(int[] xs) {
    if (len(xs) == 0) { throw "empty"; }
    int total = 0;
    int i = 0;
    while (i < len(xs)) { total += xs[i]; i++; }
    return total / (float) len(xs);
}

void test_fib() { assert(fib(10) == 55); }
void test_mean() { assert(mean([1, 2, 4]) > 2.3); }
void test_mean_of_nothing() {
    try { mean(new int[0]); assert(false); } catch (e) { assert(e == "empty"); }
}
void test_spins() { while (true) { } }
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let unit = parse(SOURCE)?;
    let mut program = Program::single("src/demo.mj", unit);
    program.check()?;
    print!("{}", unparse_unit(program.unit("src/demo.mj").unwrap()));
    for verdict in run_tests(&program, None, StepBudget { max_steps: 100_000 })? {
        println!("{:<24} {:?} after {} steps", verdict.test_name, verdict.outcome, verdict.steps);
    }
    Ok(())
}
