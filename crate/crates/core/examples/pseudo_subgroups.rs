//! Pseudo-subgroups of small windows and stabilizer windows of a Schreier
//! graph.

use std::sync::Arc;

use locstat::free_group::{enumerate_pseudo_subgroups, pseudo_to_ball, stab_window, Window};
use locstat::graph::SchreierGraph;

fn main() -> locstat::error::Result<()> {
    let w1 = Arc::new(Window::new(2, 1)?);
    for s in enumerate_pseudo_subgroups(&w1, 1_000)? {
        println!("{s}");
    }
    for k in 2..=3 {
        let w = Arc::new(Window::new(2, k)?);
        println!("W_2({k}): {} words, {} pseudo-subgroups", w.len(), enumerate_pseudo_subgroups(&w, 200_000)?.len());
    }

    let g = SchreierGraph::new(vec![vec![1, 0, 2], vec![0, 2, 1]])?;
    let w3 = Arc::new(Window::new(2, 3)?);
    for v in 0..g.n() {
        let s = stab_window(&g, v, &w3)?;
        let ball = pseudo_to_ball(&s, 1)?;
        println!("vertex {v}: {} stabilizer words, ball of {} vertices", s.len(), ball.n());
    }
    Ok(())
}
