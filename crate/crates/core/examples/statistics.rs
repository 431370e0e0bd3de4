//! The similarity, correlation and effect-size measures on small inputs.

use faultinject::evaluator::{
    is_coupled, kendall_tau_b, ochiai, pearson_r, vargha_delaney_a12, wilcoxon, WilcoxonMode,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mutant = [true, false, true, false];
    let fault = [true, true, false, false];
    println!("ochiai           {:.4}", ochiai(&mutant, &fault)?);
    println!("coupled          {}", is_coupled(&mutant, &fault)?);

    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [1.0, 3.0, 2.0, 4.0];
    println!("kendall tau-b    {:.4}", kendall_tau_b(&x, &y)?);
    println!("pearson r        {:.4}", pearson_r(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0])?);
    println!("A12              {:.4}", vargha_delaney_a12(&[1.0, 2.0], &[1.0, 3.0])?);

    let low = [1.0, 2.0, 3.0];
    let high = [4.0, 5.0, 6.0];
    println!("rank-sum p       {:.4}", wilcoxon(&low, &high, WilcoxonMode::RankSum)?);
    let before = [0.2, 0.4, 0.5, 0.5, 0.7, 0.9];
    let after = [0.5, 0.6, 0.5, 0.8, 1.0, 1.0];
    println!("signed-rank p    {:.4}", wilcoxon(&after, &before, WilcoxonMode::PairedSignedRank)?);

    match kendall_tau_b(&[1.0, 1.0, 1.0], &y[..3]) {
        Ok(v) => println!("constant input   {v}"),
        Err(e) => println!("constant input   {e}"),
    }
    Ok(())
}
