use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{check_query, Algorithm, OpenList, Outcome, PathResult, SearchError};
use crate::candidate_vertices::{generate_cv, CvContext};
use crate::grid_map::{Node, Query};

/// Focal any-angle A*. Each expanded node only propagates to its candidate
/// vertices; the search ends as soon as the target is among them.
pub fn fa_astar(query: Query, ctx: &CvContext<'_>) -> Result<PathResult, SearchError> {
    check_query(query, ctx.map())?;
    let Query { start, target } = query;
    if start == target {
        let mut r = PathResult::trivial(Algorithm::FaAstar, start);
        r.w = Some(ctx.w());
        return Ok(r);
    }
    let clock = Instant::now();
    let mut open = OpenList::new();
    let mut closed: HashSet<Node> = HashSet::new();
    open.insert(start, start, 0.0, start.distance(target));
    let mut expansions = 0;
    let mut dead_ends = 0;
    let mut next = open.pop();
    while let Some(current) = next {
        expansions += 1;
        let g = open.get(current).expect("popped nodes are stored").g;
        let cv = generate_cv(current, target, ctx, &closed);
        log::debug!("fa-a* expand {current}: {}", cv.diagnostics);
        if cv.target_directly_visible {
            open.refresh(target, current, g + current.distance(target), 0.0);
            break;
        }
        if cv.candidates.is_empty() {
            dead_ends += 1;
        }
        for c in &cv.candidates {
            open.refresh(
                c.node,
                current,
                g + current.distance(c.node),
                c.node.distance(target),
            );
        }
        open.close(current);
        closed.insert(current);
        next = open.pop();
    }
    let mut result = PathResult::from_open(
        Algorithm::FaAstar,
        &open,
        target,
        expansions,
        clock.elapsed(),
    );
    result.w = Some(ctx.w());
    result.dead_ends = dead_ends;
    Ok(result)
}

/// How the escalating planner walks the scale factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscalationPolicy {
    pub w_max: f64,
    pub w_step: f64,
    /// Relative tolerance for matching the reference length.
    pub tolerance: f64,
}

impl Default for EscalationPolicy {
    fn default() -> Self {
        Self {
            w_max: 2.2,
            w_step: 0.1,
            tolerance: 1e-9,
        }
    }
}

impl EscalationPolicy {
    /// `1, 1 + step, 1 + 2 step, ...` up to `w_max`, computed without
    /// accumulating rounding error.
    pub fn schedule(&self) -> Vec<f64> {
        let steps = ((self.w_max - 1.0) / self.w_step + 1e-9).floor().max(0.0) as usize;
        (0..=steps).map(|k| 1.0 + k as f64 * self.w_step).collect()
    }
}

/// Runs [`fa_astar`] with growing `w` until its length matches `reference`.
/// Returns the first matching run, otherwise the shortest one. Every attempt
/// is listed in [`PathResult::attempts`]; `elapsed` sums all attempts.
pub fn fa_astar_escalating(
    query: Query,
    ctx: &CvContext<'_>,
    reference: f64,
    policy: EscalationPolicy,
) -> Result<PathResult, SearchError> {
    check_query(query, ctx.map())?;
    if query.start == query.target {
        return fa_astar(query, ctx);
    }
    let matches = |len: f64| len <= reference * (1.0 + policy.tolerance) + policy.tolerance;
    let mut best: Option<PathResult> = None;
    let mut attempts = Vec::new();
    let mut total = Duration::ZERO;
    for w in policy.schedule() {
        let ctx = ctx.with_w(w).expect("schedule starts at 1");
        let r = fa_astar(query, &ctx)?;
        total += r.elapsed;
        let len = if r.found { r.length } else { f64::INFINITY };
        attempts.push((w, len));
        let done = r.found && matches(r.length);
        let better = match &best {
            None => true,
            Some(b) => r.found && (!b.found || r.length < b.length),
        };
        if better {
            best = Some(r);
        }
        if done {
            break;
        }
    }
    let mut best = best.expect("schedule is never empty");
    best.attempts = attempts;
    best.elapsed = total;
    if !best.found {
        best.outcome = Outcome::Exhausted;
    }
    Ok(best)
}
