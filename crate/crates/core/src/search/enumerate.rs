//! Deletion-contraction over branches in dataset order. Each branch is
//! either contracted (closed) when it joins two components, or deleted
//! (opened) when the remaining branches still connect everything; every
//! leaf is a distinct spanning forest with one substation per tree.

use std::time::Instant;

use num_traits::ToPrimitive;

use super::{better, per_unit, SearchBudget, SearchError, SearchMode, SearchReport};
use crate::netmodel::Network;
use crate::powerflow::{evaluate_losses_with, EvalOptions};
use crate::topology::{count_spanning_forests, Configuration};
use crate::unionfind::UnionFind;

/// Recursion levels that fork into parallel tasks.
const FORK_DEPTH: u32 = 10;

#[derive(Clone, Copy, PartialEq)]
enum Fixed {
    Free,
    Closed,
    Open,
}

struct Ctx<'a> {
    net: &'a Network,
    fixed: Vec<Fixed>,
    eval: EvalOptions,
}

#[derive(Default)]
struct Tally {
    trees: u64,
    best: Option<(f64, Configuration)>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.trees += other.trees;
        self.best = match (self.best, other.best) {
            (Some(a), Some(b)) => Some(if better((b.0, &b.1), (a.0, &a.1)) { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }
}

impl Ctx<'_> {
    /// Whether branches from `k` on (minus forced-open ones) can still join
    /// all components.
    fn connectable(&self, k: usize, comp: &[usize], n_comp: usize) -> bool {
        let mut uf = UnionFind::new(comp.len());
        let mut joins = 0;
        for e in k..self.net.n_branches() {
            if self.fixed[e] == Fixed::Open {
                continue;
            }
            let (a, b) = self.net.endpoints(e);
            if uf.union(comp[a], comp[b]) {
                joins += 1;
                if joins + 1 == n_comp {
                    return true;
                }
            }
        }
        joins + 1 >= n_comp
    }

    fn leaf(&self, closed: Vec<bool>) -> Tally {
        let cfg = Configuration::new(closed);
        debug_assert!(crate::topology::is_radial(self.net, &cfg).unwrap());
        let loss = evaluate_losses_with(self.net, &cfg, &self.eval);
        Tally {
            trees: 1,
            best: Some((loss, cfg)),
        }
    }

    fn walk(&self, k: usize, comp: Vec<usize>, n_comp: usize, mut closed: Vec<bool>, forks: u32) -> Tally {
        if n_comp == 1 {
            // every remaining branch would close a cycle
            if (k..self.net.n_branches()).any(|e| self.fixed[e] == Fixed::Closed) {
                return Tally::default();
            }
            return self.leaf(closed);
        }
        if k == self.net.n_branches() {
            return Tally::default();
        }
        let (a, b) = self.net.endpoints(k);
        let (ca, cb) = (comp[a], comp[b]);
        let can_close = ca != cb && self.fixed[k] != Fixed::Open;
        let can_open = self.fixed[k] != Fixed::Closed && self.connectable(k + 1, &comp, n_comp);

        let close = |closed: Vec<bool>| {
            let mut closed = closed;
            closed[k] = true;
            let merged: Vec<usize> = comp.iter().map(|&c| if c == cb { ca } else { c }).collect();
            self.walk(k + 1, merged, n_comp - 1, closed, forks + 1)
        };
        match (can_close, can_open) {
            (true, true) if forks < FORK_DEPTH => {
                let open_copy = closed.clone();
                let (x, y) = rayon::join(
                    || close(closed),
                    || self.walk(k + 1, comp.clone(), n_comp, open_copy, forks + 1),
                );
                x.merge(y)
            }
            (true, true) => {
                let x = close(closed.clone());
                closed[k] = false;
                x.merge(self.walk(k + 1, comp.clone(), n_comp, closed, forks))
            }
            (true, false) => close(closed),
            (false, true) => self.walk(k + 1, comp.clone(), n_comp, closed, forks),
            (false, false) => Tally::default(),
        }
    }
}

/// Evaluates every radial configuration that keeps non-switchable branches
/// in their dataset state and returns the best one.
pub fn enumerate_radial(net: &Network, budget: &SearchBudget) -> Result<SearchReport, SearchError> {
    let start = Instant::now();
    let net = per_unit(net)?;
    let fixed: Vec<Fixed> = net
        .branches()
        .iter()
        .map(|b| match (b.switchable, b.initially_closed) {
            (true, _) => Fixed::Free,
            (false, true) => Fixed::Closed,
            (false, false) => Fixed::Open,
        })
        .collect();
    let forced: Vec<usize> = (0..fixed.len()).filter(|&k| fixed[k] == Fixed::Closed).collect();
    let forbidden: Vec<usize> = (0..fixed.len()).filter(|&k| fixed[k] == Fixed::Open).collect();
    let count = count_spanning_forests(&net, &forced, &forbidden);
    match count.to_u64() {
        Some(c) if c <= budget.max_trees => {}
        _ => {
            return Err(SearchError::BudgetExceeded {
                count,
                max: budget.max_trees,
            })
        }
    }

    // Substations start out merged into one component.
    let subs = net.substations();
    let comp: Vec<usize> = (0..net.n_buses())
        .map(|i| if net.bus(i).is_substation { subs[0] } else { i })
        .collect();
    let n_comp = net.n_buses() - subs.len() + 1;
    let ctx = Ctx {
        net: &net,
        fixed,
        eval: budget.eval,
    };
    let tally = ctx.walk(0, comp, n_comp, vec![false; net.n_branches()], 0);
    let Some((loss, cfg)) = tally.best else {
        return Err(SearchError::NoRadialConfiguration);
    };
    if !loss.is_finite() {
        return Err(SearchError::NoFeasibleConfiguration);
    }
    Ok(SearchReport {
        best_cfg: cfg,
        best_losses_kw: loss,
        configurations_evaluated: tally.trees,
        trees_enumerated: Some(tally.trees),
        wall_time: start.elapsed(),
        mode: SearchMode::Exact,
        trace: Vec::new(),
    })
}
