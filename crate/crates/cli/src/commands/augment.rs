use spectraforge_core::augment::{matrix_power_view, random_topology_augment, TopologyMode};

use super::{choice, load_graph, save_graph};
use crate::args::AugmentArgs;
use crate::config::Resolver;
use crate::report::write_sidecar;
use crate::{CliResult, InModule};

#[derive(Clone, Copy)]
enum Mode {
    Random(TopologyMode),
    TwoHop,
}

pub fn run(args: AugmentArgs) -> CliResult<()> {
    let mut r = Resolver::new("augment", args.common.config.as_deref())?;
    let graph = r.input("graph", args.graph)?;
    let mode_name = r.required("mode", args.mode)?;
    let mode = choice(
        "mode",
        &mode_name,
        &[
            ("edge-drop", Mode::Random(TopologyMode::EdgeDrop)),
            ("node-drop", Mode::Random(TopologyMode::NodeDrop)),
            ("edge-perturb", Mode::Random(TopologyMode::EdgePerturb)),
            ("subgraph", Mode::Random(TopologyMode::Subgraph)),
            ("two-hop", Mode::TwoHop),
        ],
    )?;
    let rate = match mode {
        Mode::Random(_) => Some(r.get("rate", args.rate, 0.2)?),
        Mode::TwoHop => None,
    };
    let seed = r.seed(args.common.seed)?;
    let manifest = r.finish(seed)?;

    let g = load_graph(&graph)?;
    let out = match (mode, rate) {
        (Mode::Random(m), Some(rate)) => random_topology_augment(&g, m, rate, seed),
        _ => matrix_power_view(&g, 2),
    }
    .in_module("augment")?;
    save_graph(&out, &args.out)?;
    write_sidecar(&args.out, &manifest)
}
