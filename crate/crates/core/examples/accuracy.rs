//! Point-accuracy measures and the MAPE interpretation bands.

use epiarima::accuracy::{adj_r2, lewis_class, mae, mape, mase, rmse};

fn main() -> epiarima::Result<()> {
    let training = [120.0, 135.0, 150.0, 160.0, 158.0, 171.0, 180.0];
    let actual = [185.0, 190.0, 204.0, 199.0];
    let predicted = [182.0, 193.0, 196.0, 207.0];

    let pct = mape(&actual, &predicted)?;
    println!("MAE   {:.3}", mae(&actual, &predicted)?);
    println!("RMSE  {:.3}", rmse(&actual, &predicted)?);
    println!("MAPE  {pct:.3}% ({})", lewis_class(pct));
    println!("MASE  {:.3}", mase(&actual, &predicted, &training)?);
    println!("adj R2 (k = 1) {:.3}", adj_r2(&actual, &predicted, 1)?);
    Ok(())
}
