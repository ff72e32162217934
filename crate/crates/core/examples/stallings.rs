//! Subgroup membership through folded automata.

use locstat::free_group::{StallingsGraph, Window, Word};

fn main() -> locstat::error::Result<()> {
    let gens = [Word::parse("a1 a2 a1^-1")?, Word::parse("a2^2")?];
    let h = StallingsGraph::from_generators(2, &gens);
    println!("core graph with {} states, folded: {}", h.num_states(), h.is_folded());

    for w in ["a1 a2^3 a1^-1", "a2", "a2^2", "a1 a2 a1^-1 a2^2"] {
        let w = Word::parse(w)?;
        println!("{w:20} {}", if h.contains(&w) { "in" } else { "out" });
    }

    let window = Window::new(2, 3)?;
    let members = h.intersect_window(&window);
    let shown: Vec<String> = window.words_of(&members).map(Word::to_string).collect();
    println!("members of length at most 3: {}", shown.join(", "));
    Ok(())
}
