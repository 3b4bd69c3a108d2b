//! Depth-first enumeration of the candidate list
//! `T(X^n | y) = { x : -log2 P(x | y) <= nu }` in lexicographic order.
//!
//! A branch is cut as soon as its prefix surprisal plus the cheapest
//! possible completion exceeds `nu`.

use crate::error::Result;
use crate::source::{ConditionalModel, Symbol};

// Pruning is done against `nu + PRUNE_SLACK` so that floating-point
// reassociation in the lower bound never drops a member; membership itself
// is decided on the exact left-to-right sum.
const PRUNE_SLACK: f64 = 1e-9;

pub struct TypicalSet<'a> {
    model: &'a ConditionalModel,
    y: &'a [Symbol],
    nu: f64,
    // cheapest completion of positions i..n
    suffix_min: Vec<f64>,
    prefix: Vec<Symbol>,
    // prefix_cost[d] is the surprisal of prefix[..d]
    prefix_cost: Vec<f64>,
    next_symbol: Vec<Symbol>,
    done: bool,
}

impl<'a> TypicalSet<'a> {
    pub fn new(model: &'a ConditionalModel, y: &'a [Symbol], nu: f64) -> Result<Self> {
        model.check_defined(y)?;
        let n = y.len();
        let nx = model.x_alphabet();
        let mut suffix_min = vec![0.0; n + 1];
        for i in (0..n).rev() {
            let cheapest = (0..nx)
                .map(|x| model.symbol_surprisal(x, y[i]))
                .fold(f64::INFINITY, f64::min);
            suffix_min[i] = suffix_min[i + 1] + cheapest;
        }
        let mut prefix_cost = Vec::with_capacity(n + 1);
        prefix_cost.push(0.0);
        Ok(TypicalSet {
            model,
            y,
            nu,
            done: suffix_min[0] > nu + PRUNE_SLACK,
            suffix_min,
            prefix: Vec::with_capacity(n),
            prefix_cost,
            next_symbol: vec![0; n + 1],
        })
    }
}

impl Iterator for TypicalSet<'_> {
    type Item = Vec<Symbol>;

    fn next(&mut self) -> Option<Vec<Symbol>> {
        let n = self.y.len();
        let nx = self.model.x_alphabet();
        loop {
            if self.done {
                return None;
            }
            let depth = self.prefix.len();
            if depth == n {
                let total = self.prefix_cost[n];
                let out = (total <= self.nu).then(|| self.prefix.clone());
                self.backtrack();
                if out.is_some() {
                    return out;
                }
                continue;
            }
            let base = self.prefix_cost[depth];
            let mut chosen = None;
            for s in self.next_symbol[depth]..nx {
                let cost = base + self.model.symbol_surprisal(s, self.y[depth]);
                if cost.is_finite() && cost + self.suffix_min[depth + 1] <= self.nu + PRUNE_SLACK {
                    chosen = Some((s, cost));
                    break;
                }
            }
            match chosen {
                Some((s, cost)) => {
                    self.next_symbol[depth] = s + 1;
                    self.prefix.push(s);
                    self.prefix_cost.push(cost);
                    self.next_symbol[depth + 1] = 0;
                }
                None => self.backtrack(),
            }
        }
    }
}

impl TypicalSet<'_> {
    fn backtrack(&mut self) {
        if self.prefix.pop().is_none() {
            self.done = true;
            return;
        }
        self.prefix_cost.pop();
    }
}

/// Collects the candidate list; mainly for tests and small instances.
pub fn enumerate_typical(
    model: &ConditionalModel,
    y: &[Symbol],
    nu: f64,
) -> Result<Vec<Vec<Symbol>>> {
    Ok(TypicalSet::new(model, y, nu)?.collect())
}
