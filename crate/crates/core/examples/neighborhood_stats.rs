//! Radius-1 statistics of a star, a 4-cycle and a path, and their `d_∞`
//! distances.

use locstat::graph::BoundedDegreeGraph;
use locstat::rational::to_string;
use locstat::stats::{enumerate_balls, neighborhood_stats, stat_distance};

fn main() -> locstat::error::Result<()> {
    let star = BoundedDegreeGraph::star(3);
    let cycle = BoundedDegreeGraph::cycle(4).with_delta(3)?;
    let path = BoundedDegreeGraph::path(4).with_delta(3)?;

    let catalog = enumerate_balls(3, 1, 64)?;
    println!("{} rooted balls of radius 1 and degree at most 3", catalog.len());

    for (name, g) in [("K_1,3", &star), ("C_4", &cycle), ("P_4", &path)] {
        let s = neighborhood_stats(g, 1)?;
        let coords: Vec<String> = catalog.coordinates(&s)?.iter().map(to_string).collect();
        println!("{name:6} {}", coords.join(" "));
    }
    let s = neighborhood_stats(&star, 1)?;
    println!("d(K_1,3, C_4) = {}", stat_distance(&s, &neighborhood_stats(&cycle, 1)?)?);
    println!("d(K_1,3, P_4) = {}", stat_distance(&s, &neighborhood_stats(&path, 1)?)?);
    Ok(())
}
