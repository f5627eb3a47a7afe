//! Relation sizes and prove/verify timings.
//!
//! ```text
//! cargo run --release --example bench -- 200
//! ```

use zkagree::bench;
use zkagree::proofsys::default_srs;

fn main() {
    let iterations = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(bench::DEFAULT_ITERATIONS);
    let report = bench::run(&default_srs(), iterations);
    print!("{}", report.table());
}
