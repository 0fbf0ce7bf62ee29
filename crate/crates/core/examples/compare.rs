//! Runs all four planners on one seeded random map and prints a table.
//!
//! `cargo run --example compare -- [density] [seed]`

use anyangle::candidate_vertices::CvContext;
use anyangle::grid_map::{generate_random_with_clearance, Cell, Node, Query};
use anyangle::preprocess::{preprocess, VertexMode};
use anyangle::search::{
    astar_grid, astar_visgraph, fa_astar, theta_star, visgraph_nodes, PlannerConfig,
};
use anyangle::visibility::VisibilityConfig;

fn main() {
    let mut args = std::env::args().skip(1);
    let density: f64 = args.next().map_or(0.2, |a| a.parse().expect("density"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));

    let keep = [Cell::new(0, 0), Cell::new(49, 49)];
    let map = generate_random_with_clearance(50, 50, density, seed, &keep).unwrap();
    let query = Query::new(Node::new(0, 0), Node::new(50, 50));
    let cfg = PlannerConfig::default();

    let pre = preprocess(&map, true, VertexMode::Hull);
    let ctx = CvContext::new(&map, &pre, VisibilityConfig::STRICT, 1.0).unwrap();
    let results = [
        astar_grid(query, &map, cfg).unwrap(),
        theta_star(query, &map, cfg).unwrap(),
        astar_visgraph(query, &map, &visgraph_nodes(&map, true), cfg).unwrap(),
        fa_astar(query, &ctx).unwrap(),
    ];

    println!(
        "{:<16} {:>6} {:>10} {:>6} {:>10}",
        "algorithm", "found", "L", "No", "T (ms)"
    );
    for r in &results {
        println!(
            "{:<16} {:>6} {:>10.4} {:>6} {:>10.3}",
            r.algorithm.as_str(),
            r.found,
            r.length,
            r.evaluated_nodes,
            r.elapsed.as_secs_f64() * 1e3
        );
    }
}
