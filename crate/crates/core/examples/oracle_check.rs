//! Closed-form pmf against exhaustive enumeration of every stopped path.
//! Writes the enumerated vector as a fixture when given a path.
//!
//! ```text
//! cargo run --example oracle_check -- /tmp/snb_0.2_7_11.tsv
//! ```

use snb::dist::SnbParams;
use snb::oracle::{enumerate_law, write_fixture};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut worst: f64 = 0.0;
    let mut designs = 0;
    for p in [0.1, 0.25, 0.5, 0.8] {
        for s in 1..=16 {
            for t in 1..=(17 - s) {
                let d = SnbParams::new(p, s, t)?;
                let law = enumerate_law(&d)?;
                for k in d.support_iter() {
                    worst = worst.max((d.pmf(k) - law.pmf(k)).abs());
                }
                designs += 1;
            }
        }
    }
    println!("{designs} designs, largest pointwise deviation {worst:e}");

    if let Some(path) = std::env::args().nth(1) {
        let law = enumerate_law(&SnbParams::new(0.2, 7, 11)?)?;
        write_fixture(&law, std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
