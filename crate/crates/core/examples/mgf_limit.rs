//! The moment generating function, and its approach to the negative
//! binomial as the futility boundary recedes.

use snb::dist::SnbParams;

fn main() -> snb::Result<()> {
    let (p, s, x) = (0.3f64, 2u64, 0.05f64);
    let q = 1.0 - p;
    let negbin = (p * x.exp() / (1.0 - q * x.exp())).powi(s as i32);
    println!("negative binomial mgf at x={x}: {negbin:.12}");
    for t in [5, 20, 50, 100, 500] {
        let m = SnbParams::new(p, s, t)?.mgf(x)?;
        println!("t={t:>4}: mgf {m:.12}  gap {:.3e}", (m - negbin).abs());
    }

    let d = SnbParams::new(0.2, 7, 11)?;
    let bound = (1.0f64 / 0.8).ln();
    match d.mgf(bound) {
        Ok(v) => println!("unexpected value {v}"),
        Err(e) => println!("at the edge of the domain: {e}"),
    }
    Ok(())
}
