//! Both encodings and their round trips.

use locstat::corpus::isomorphic;
use locstat::encoding::{decode_graph, decode_schreier, encode_graph, encode_schreier, GadgetLayout, OrderingPolicy};
use locstat::graph::{BoundedDegreeGraph, SchreierGraph};

fn main() -> locstat::error::Result<()> {
    let g = BoundedDegreeGraph::star(3);
    let action = encode_graph(&g, &OrderingPolicy::Ascending)?;
    println!("K_1,3 -> F_2 action on {} directed edges", action.n());
    let (back, bad) = decode_schreier(&action, 3)?;
    println!("decoded: {} vertices, bad fraction {bad}, isomorphic: {}", back.n(), isomorphic(&g, &back));

    let layout = GadgetLayout::new(2)?;
    let s = SchreierGraph::new(vec![vec![1, 2, 0], vec![0, 2, 1]])?;
    let cubic = encode_schreier(&s, &layout)?;
    println!(
        "3-point action -> graph with {} vertices ({} per point), max degree {}",
        cubic.n(),
        layout.block_size(),
        cubic.max_degree()
    );
    let (s2, bad) = decode_graph(&cubic, 2)?;
    println!("decoded: bad fraction {bad}, conjugate: {}", s2.canonical_form() == s.canonical_form());
    Ok(())
}
