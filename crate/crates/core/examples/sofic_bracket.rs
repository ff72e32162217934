//! Lower bounds from small Schreier graphs against upper bounds from
//! pseudo-IRS polytopes, and a bracket under a claimed regularity bound.

use locstat::free_group::DEFAULT_PSEUDO_CAP;
use locstat::local_test::{sofic_bracket, sofic_lower_search, standard_suite, DEFAULT_TUPLE_CAP};
use locstat::pirs::irs_upper_bound;
use locstat::rational::ratio;

fn main() -> locstat::error::Result<()> {
    for (name, t) in standard_suite() {
        let (lower, witness) = sofic_lower_search(&t, 4, DEFAULT_TUPLE_CAP)?;
        let upper = irs_upper_bound(&t, 3.max(t.radius()), DEFAULT_PSEUDO_CAP)?;
        println!("{name:18} {lower} <= val <= {upper}   witness on {} points", witness.n());
    }

    let (_, t) = standard_suite().swap_remove(0);
    // a made-up bound: every 1/8-approximation needs at most 3 points
    let bracket = sofic_bracket(&t, &ratio(1, 8), &|_, _| 3, (DEFAULT_PSEUDO_CAP, DEFAULT_TUPLE_CAP))?;
    println!(
        "bracket [{}, {}] with eps = {} over {} balls",
        bracket.lower, bracket.upper, bracket.epsilon, bracket.catalog_size
    );
    Ok(())
}
