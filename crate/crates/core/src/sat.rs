//! Seed-map engine: a CNF over the n×m cell variables, a small DPLL
//! solver, and exact minimum-weight model search.
//!
//! Instances here stay tiny (tens of variables), so the solver is plain
//! unit propagation plus chronological backtracking over a static
//! lexicographic variable order. `solve` decides true-first;
//! `minimum_model` branches false-first under branch-and-bound on the
//! count of true variables, which makes the first optimum it keeps the
//! lexicographically smallest one.

use crate::error::{Error, Result};
use crate::profile::CellIndex;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
struct Lit {
    var: usize,
    positive: bool,
}

/// A total assignment satisfying the owning formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    /// Wrap an explicit assignment (useful for cross-checking a formula
    /// against externally enumerated assignments).
    pub fn from_values(values: Vec<bool>) -> Self {
        Model { values }
    }

    pub fn get(&self, var: usize) -> bool {
        self.values[var]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn true_count(&self) -> usize {
        self.values.iter().filter(|&&v| v).count()
    }
}

/// CNF over one Boolean variable per cell of an n×m grid.
///
/// Variable `(i, j)` lives at index `i*m + j`. In the locked orientation
/// (`new`) a true variable means the cell is kept; every instance carries
/// the row irredundancy clauses `x_{i,j0} ∨ ⋁_{j≠j0} ¬x_{i,j}`, which
/// forbid models keeping all but one cell of a row. The freed orientation
/// (`new_freed`) mirrors them, forbidding models that release exactly one
/// cell of a row.
pub struct SeedCnf {
    n: usize,
    m: usize,
    clauses: Vec<Vec<Lit>>,
}

impl SeedCnf {
    pub fn new(n: usize, m: usize) -> Self {
        Self::with_row_clauses(n, m, true)
    }

    pub fn new_freed(n: usize, m: usize) -> Self {
        Self::with_row_clauses(n, m, false)
    }

    fn with_row_clauses(n: usize, m: usize, locked_orientation: bool) -> Self {
        let mut cnf = SeedCnf { n, m, clauses: Vec::with_capacity(n * m) };
        for i in 0..n {
            for j0 in 0..m {
                let mut clause = Vec::with_capacity(m);
                clause.push(Lit { var: i * m + j0, positive: locked_orientation });
                for j in (0..m).filter(|&j| j != j0) {
                    clause.push(Lit { var: i * m + j, positive: !locked_orientation });
                }
                cnf.clauses.push(clause);
            }
        }
        cnf
    }

    pub fn num_vars(&self) -> usize {
        self.n * self.m
    }

    pub fn var_of(&self, cell: CellIndex) -> usize {
        debug_assert!(cell.voter < self.n && cell.position < self.m);
        cell.voter * self.m + cell.position
    }

    fn blocking(&mut self, cells: &[CellIndex], positive: bool) -> Result<()> {
        if cells.is_empty() {
            return Err(Error::Precondition(
                "blocking clause over an empty cell set".into(),
            ));
        }
        let clause = cells
            .iter()
            .map(|&c| Lit { var: self.var_of(c), positive })
            .collect();
        self.clauses.push(clause);
        Ok(())
    }

    /// Block every superset of `cells`: adds `⋁ ¬x`.
    pub fn add_blocking_up(&mut self, cells: &[CellIndex]) -> Result<()> {
        self.blocking(cells, false)
    }

    /// Block every model missing `cells` entirely: adds `⋁ x`.
    pub fn add_blocking_down(&mut self, cells: &[CellIndex]) -> Result<()> {
        self.blocking(cells, true)
    }

    pub fn is_satisfied_by(&self, model: &Model) -> bool {
        model.len() == self.num_vars()
            && self
                .clauses
                .iter()
                .all(|cl| cl.iter().any(|l| model.get(l.var) == l.positive))
    }

    /// One clause per line, 1-indexed signed variables.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for clause in &self.clauses {
            let body: Vec<String> = clause
                .iter()
                .map(|l| {
                    let v = (l.var + 1) as i64;
                    (if l.positive { v } else { -v }).to_string()
                })
                .collect();
            out.push_str(&body.join(" "));
            out.push('\n');
        }
        out
    }

    /// Some satisfying model, or `None` when the formula is exhausted.
    /// Decisions follow the static variable order, true first.
    pub fn solve(&self) -> Option<Model> {
        let mut search = Search::new(self);
        if !search.propagate() {
            return None;
        }
        search.solve_any().then(|| Model {
            values: search.assign.iter().map(|v| v.unwrap_or(false)).collect(),
        })
    }

    /// A model with the fewest true variables; ties break toward the
    /// lexicographically smallest assignment.
    ///
    /// Two passes: a clause-directed branch and bound proves the optimum
    /// weight, then a false-first lexicographic walk budgeted at that
    /// weight returns the first (hence lexicographically smallest)
    /// optimal model. Both prune on the count of true variables against
    /// the bound, tightened by an admissible hitting-set lower bound.
    pub fn minimum_model(&self) -> Option<Model> {
        let mut search = Search::new(self);
        if !search.propagate() {
            return None;
        }
        let mut best: Option<usize> = None;
        search.optimum_weight(&mut best);
        let optimum = best?;
        let mut search = Search::new(self);
        if !search.propagate() {
            return None;
        }
        let values = search
            .lex_first_within(optimum)
            .expect("a model of optimum weight exists");
        Some(Model { values })
    }
}

struct Search<'a> {
    cnf: &'a SeedCnf,
    assign: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(cnf: &'a SeedCnf) -> Self {
        Search {
            cnf,
            assign: vec![None; cnf.num_vars()],
            trail: Vec::new(),
        }
    }

    fn set(&mut self, var: usize, value: bool) {
        debug_assert!(self.assign[var].is_none());
        self.assign[var] = Some(value);
        self.trail.push(var);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let var = self.trail.pop().expect("trail underflow");
            self.assign[var] = None;
        }
    }

    /// Unit propagation to fixpoint; false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for clause in &self.cnf.clauses {
                let mut unassigned: Option<&Lit> = None;
                let mut satisfied = false;
                let mut open = 0usize;
                for lit in clause {
                    match self.assign[lit.var] {
                        Some(v) if v == lit.positive => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open += 1;
                            unassigned = Some(lit);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (open, unassigned) {
                    (0, _) => return false,
                    (1, Some(lit)) => {
                        self.assign[lit.var] = Some(lit.positive);
                        self.trail.push(lit.var);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn next_unassigned(&self) -> Option<usize> {
        self.assign.iter().position(Option::is_none)
    }

    fn solve_any(&mut self) -> bool {
        let Some(var) = self.next_unassigned() else {
            return true;
        };
        for value in [true, false] {
            let mark = self.trail.len();
            self.set(var, value);
            if self.propagate() && self.solve_any() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }

    fn true_count(&self) -> usize {
        self.trail
            .iter()
            .filter(|&&v| self.assign[v] == Some(true))
            .count()
    }

    /// Unassigned variables of every unsatisfied clause whose open
    /// literals are all positive. Each such clause still needs a new true.
    fn critical_clauses(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        'clauses: for clause in &self.cnf.clauses {
            let mut open: Vec<usize> = Vec::new();
            for lit in clause {
                match self.assign[lit.var] {
                    Some(v) if v == lit.positive => continue 'clauses,
                    Some(_) => {}
                    None => {
                        if !lit.positive {
                            continue 'clauses;
                        }
                        open.push(lit.var);
                    }
                }
            }
            out.push(open);
        }
        out
    }

    /// Admissible lower bound on additional true variables: the better of
    /// a greedy variable-disjoint clause packing and the sum of exact
    /// per-row hitting-set costs over the clauses confined to one row
    /// (rows have disjoint variables, so per-row optima add up).
    fn lower_bound(&self, critical: &[Vec<usize>]) -> usize {
        let m = self.cnf.m;
        let mut used = vec![false; self.cnf.num_vars()];
        let mut packing = 0usize;
        for vars in critical {
            if vars.iter().any(|&v| used[v]) {
                continue;
            }
            for &v in vars {
                used[v] = true;
            }
            packing += 1;
        }

        let mut per_row = 0usize;
        if m <= 8 {
            for row in 0..self.cnf.n {
                let base = row * m;
                let row_clauses: Vec<u32> = critical
                    .iter()
                    .filter(|vars| !vars.is_empty() && vars.iter().all(|&v| v / m == row))
                    .map(|vars| vars.iter().fold(0u32, |acc, &v| acc | 1 << (v - base)))
                    .collect();
                if row_clauses.is_empty() {
                    continue;
                }
                let full = (1u32 << m) - 1;
                'sizes: for size in 1..=m {
                    for mask in 0..=full {
                        if mask.count_ones() as usize == size
                            && row_clauses.iter().all(|&c| c & mask != 0)
                        {
                            per_row += size;
                            break 'sizes;
                        }
                    }
                }
            }
        }
        packing.max(per_row)
    }

    /// Prove the minimum number of true variables over any model.
    /// Branches on the smallest critical clause, partitioned by its first
    /// true variable; with no critical clause left, completing with false
    /// everywhere yields a model of the current weight.
    fn optimum_weight(&mut self, best: &mut Option<usize>) {
        let trues = self.true_count();
        let critical = self.critical_clauses();
        if let Some(incumbent) = best {
            if trues + self.lower_bound(&critical) >= *incumbent {
                return;
            }
        }
        let Some(branch) = critical.iter().min_by_key(|vars| vars.len()) else {
            *best = Some(trues);
            return;
        };
        let branch = branch.clone();
        for k in 0..branch.len() {
            let mark = self.trail.len();
            let mut ok = true;
            for &v in &branch[..k] {
                match self.assign[v] {
                    None => self.set(v, false),
                    Some(false) => {}
                    Some(true) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                match self.assign[branch[k]] {
                    None => self.set(branch[k], true),
                    Some(true) => {}
                    Some(false) => ok = false,
                }
            }
            if ok && self.propagate() {
                self.optimum_weight(best);
            }
            self.undo_to(mark);
        }
    }

    /// First model in false-first lexicographic leaf order with at most
    /// `budget` true variables.
    fn lex_first_within(&mut self, budget: usize) -> Option<Vec<bool>> {
        let trues = self.true_count();
        let critical = self.critical_clauses();
        if trues + self.lower_bound(&critical) > budget {
            return None;
        }
        let Some(var) = self.next_unassigned() else {
            return Some(self.assign.iter().map(|v| v.expect("complete")).collect());
        };
        for value in [false, true] {
            let mark = self.trail.len();
            self.set(var, value);
            if self.propagate() {
                if let Some(model) = self.lex_first_within(budget) {
                    return Some(model);
                }
            }
            self.undo_to(mark);
        }
        None
    }
}
