//! Mean and variance of the enrollment as the response rate sweeps [0, 1].
//!
//! ```text
//! cargo run --example moments_sweep -- 7 11
//! ```

use snb::commands::parse_grid;
use snb::dist::SnbParams;

fn main() -> snb::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("s and t are integers"));
    let s = args.next().unwrap_or(7);
    let t = args.next().unwrap_or(11);
    println!("p,mean,variance");
    for p in parse_grid("0:1:0.05")? {
        let m = SnbParams::new(p, s, t)?.moments();
        println!("{p:.2},{:.6},{:.6}", m.mean, m.variance);
    }
    Ok(())
}
