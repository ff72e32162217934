//! Whether the statistics image of a pseudo-IRS polytope lies inside a
//! union of open boxes.

use locstat::canon::canonical_code;
use locstat::graph::SchreierGraph;
use locstat::pirs::{m_machine, MachineCaps, MachineOutcome, OpenBox, Region};
use locstat::rational::{one, ratio};
use locstat::stats::enumerate_schreier_balls;

fn report(name: &str, out: MachineOutcome) {
    match out {
        MachineOutcome::Halted { k } => println!("{name}: contained at k = {k}"),
        MachineOutcome::CapReached { k_max, witness } => {
            println!("{name}: not certified up to k = {k_max}; witness:");
            for (code, x) in &witness.entries {
                println!("  {code}  {x}");
            }
        }
    }
}

fn main() -> locstat::error::Result<()> {
    let catalog = enumerate_schreier_balls(2, 0, 1_000)?;
    let caps = MachineCaps::default();
    report("whole cube", m_machine(2, 0, &Region::whole_cube(&catalog), 3, caps)?);

    // everything except the point mass on the trivial action
    let trivial = canonical_code(&SchreierGraph::trivial(2).ball(0, 0)?);
    let punctured = Region {
        kind: catalog.kind,
        radius: 0,
        boxes: vec![OpenBox { bounds: [(trivial, (ratio(-1, 10), one()))].into() }],
    };
    report("punctured cube", m_machine(2, 0, &punctured, 3, caps)?);
    Ok(())
}
