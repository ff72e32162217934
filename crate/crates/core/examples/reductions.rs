//! Transferring claimed regularity bounds between graphs and Schreier
//! graphs through the two encodings.

use locstat::corpus::GraphCorpus;
use locstat::rational::ratio;
use locstat::reductions::{schreier_bound_from_sparse, sparse_bound_from_schreier, BoundOracle, OracleKind};

fn main() -> locstat::error::Result<()> {
    let schreier = BoundOracle::constant(OracleKind::Schreier { d: 2 }, 3);
    let t = sparse_bound_from_schreier(&schreier, 3, &ratio(1, 2), 0, 100_000)?;
    println!("sparse bound N = {} (asked the oracle at eps {} radius {})", t.n, t.eps0, t.r0);

    let sparse = BoundOracle::constant(OracleKind::Sparse { delta: 3 }, 40);
    let mut corpus = GraphCorpus::new(3, 1_000_000);
    let t = schreier_bound_from_sparse(&sparse, &mut corpus, 2, &ratio(1, 2), 1, 8)?;
    println!("Schreier bound N* = {} (asked the oracle at eps {} radius {})", t.n, t.eps0, t.r0);
    Ok(())
}
