//! Lists the fault patterns and every application they offer on one statement.
//!
//! cargo run --example pattern_catalog -- ["STATEMENT"]

use faultinject::minij::{parse, Program};
use faultinject::patterns::{apply_pattern, match_statement, Catalog, MatchContext};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    for p in &catalog.patterns {
        println!("{:>2} {:<28} {:?}", p.priority, p.kind.id(), p.category);
    }

    let stmt = std::env::args().nth(1).unwrap_or_else(|| "return a + b * 2;".to_string());
    let source = format!("int helper(int v) {{ return v; }}\nint f(int a, int b) {{\n    {stmt}\n}}\n");
    let mut program = Program::single("src/demo.mj", parse(&source)?);
    let symbols = program.check()?;
    let unit = program.unit("src/demo.mj").unwrap();
    let cx = MatchContext::new("src/demo.mj", unit, &symbols);

    println!("\n{stmt}");
    for app in match_statement(&cx, &catalog, 1) {
        let Ok(mutated) = apply_pattern(unit, &app) else { continue };
        let after = faultinject::minij::locate::statements(&mutated)
            .get(1)
            .map(|(_, s)| faultinject::minij::unparse_stmt(s))
            .unwrap_or_default();
        println!("  {:<26} {:<12} {}", app.pattern_id(), app.donor.as_deref().unwrap_or("-"), after.replace('\n', " "));
    }
    Ok(())
}
