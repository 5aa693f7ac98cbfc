//! Simulate an ARIMA(1,1,1) series and recover its coefficients.

use epiarima::estimation::{fit, simulate, ArimaOrder};

fn main() -> epiarima::Result<()> {
    let order = ArimaOrder::new(1, 1, 1);
    let series = simulate(order, &[0.5], &[0.3], 0.0, 1.0, 500, 7)?;
    let model = fit(&series, order, false)?;

    println!("true     ar1 = 0.500  ma1 = 0.300  sigma2 = 1.000");
    println!(
        "estimate ar1 = {:.3}  ma1 = {:.3}  sigma2 = {:.3}",
        model.ar[0], model.ma[0], model.sigma2
    );
    Ok(())
}
