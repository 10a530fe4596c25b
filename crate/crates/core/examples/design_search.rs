//! Search boundary pairs `(s, t)` whose false-success rate under a null
//! response rate stays below a target, cheapest expected enrollment first.
//!
//! ```text
//! cargo run --example design_search -- 0.2 0.1 17
//! ```

use snb::commands::design_table;
use snb::table::Cell;

fn main() -> snb::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let p0 = args.first().copied().unwrap_or(0.2);
    let alpha = args.get(1).copied().unwrap_or(0.1);
    let max_n = args.get(2).copied().unwrap_or(17.0) as u64;

    let table = design_table(p0, alpha, max_n)?;
    println!("{} designs with type-I mass <= {alpha} at p0 = {p0}", table.rows.len());
    for row in table.rows.iter().take(10) {
        let cell = |i: usize| match &row[i] {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.5}"),
            Cell::Text(v) => v.clone(),
        };
        println!("s={:>2} t={:>2} n={:>2}  type-I {}  E[enrollment] {}", cell(0), cell(1), cell(2), cell(3), cell(4));
    }
    let s = table.column_f64("s").unwrap_or_default();
    let t = table.column_f64("t").unwrap_or_default();
    if let Some(rank) = (0..s.len()).find(|&i| s[i] == 7.0 && t[i] == 11.0) {
        println!("(7, 11) ranks {} of {}", rank + 1, s.len());
    }
    Ok(())
}
