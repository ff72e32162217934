//! Decision queries over small graphs and the nets they build.

use std::collections::BTreeMap;

use locstat::canon::canonical_code;
use locstat::corpus::GraphCorpus;
use locstat::graph::BoundedDegreeGraph;
use locstat::pirs::{OpenBox, Region};
use locstat::rational::{ratio, Rational};
use locstat::reductions::{capped_lsdf, greedy_net, lsdf_from_bound, net_from_lsdf, BoundOracle, OracleKind, StatSet};
use locstat::stats::IndexKind;

fn main() -> locstat::error::Result<()> {
    let mut corpus = GraphCorpus::new(3, 1_000_000);

    // more than half of the vertices see a triangle
    let triangle = canonical_code(&BoundedDegreeGraph::complete(3).ball(0, 1)?);
    let region = Region {
        kind: IndexKind::Plain { delta: 3 },
        radius: 1,
        boxes: vec![OpenBox { bounds: BTreeMap::from([(triangle, (ratio(1, 2), ratio(11, 10)))]) }],
    };
    println!("triangle-heavy graph: {:?}", capped_lsdf(&mut corpus, 1, &region, 4, None)?);

    let greedy = greedy_net(&mut corpus, &ratio(1, 2), 1, 6)?;
    println!("greedy 1/2-net from graphs up to 6 vertices: {} members", greedy.graphs.len());

    let oracle = BoundOracle::constant(OracleKind::Sparse { delta: 3 }, 6);
    let mut lsdf = |c: &mut GraphCorpus, e: &Rational, r: usize, s: &dyn StatSet| lsdf_from_bound(c, e, r, s, &oracle);
    let (net, n) = net_from_lsdf(&mut corpus, &ratio(1, 2), 1, &mut lsdf, &oracle.trust, 1_000)?;
    println!("net from a claimed bound of 6: {} members, largest {n} vertices, {:?}", net.graphs.len(), net.provenance);
    Ok(())
}
