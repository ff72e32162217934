//! Labeled balls of a small Schreier graph, the full radius-1 catalog for
//! two generators, and conjugacy classes of actions on three points.

use locstat::canon::canonical_code;
use locstat::graph::SchreierGraph;
use locstat::local_test::enumerate_schreier_graphs;
use locstat::stats::{enumerate_schreier_balls, schreier_stats};

fn main() -> locstat::error::Result<()> {
    // a1 rotates three points, a2 swaps the last two
    let g = SchreierGraph::new(vec![vec![1, 2, 0], vec![0, 2, 1]])?;
    for v in 0..g.n() {
        println!("vertex {v}: ball code {}", canonical_code(&g.ball(v, 1)?));
    }
    for (code, x) in &schreier_stats(&g, 1)?.entries {
        println!("  {code}  {x}");
    }

    let catalog = enumerate_schreier_balls(2, 1, 200_000)?;
    println!("{} labeled balls of radius 1 for F_2", catalog.len());

    let classes = enumerate_schreier_graphs(2, 3, true, 1_000)?.count();
    println!("{classes} actions of F_2 on 3 points up to relabeling");
    Ok(())
}
