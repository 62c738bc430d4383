//! Complete enumeration of explanations and cardinality-smallest search.
//!
//! Enumeration keeps a seed map over the cell variables: each satisfying
//! model decodes to a seed, the seed is classified by the necessary-winner
//! test, shrunk to an explanation of the matching kind, and blocked so no
//! later model can rediscover it. Exhausting the map certifies that both
//! families are complete. Smallest explanations come from the hitting-set
//! dual loop: minimum models of the map accumulate blocking clauses from
//! the opposite family until one decodes to an explanation itself.

use crate::error::{Error, Result};
use crate::explain::{self, Explanation, ExplanationKind};
use crate::profile::{complement, Candidate, CellIndex, PartialRankMatrix, RankMatrix};
use crate::sat::{Model, SeedCnf};
use crate::scoring::{self, ScoringVector};

/// Output of [`enumerate_xps`]. `complete` is false only when a `limit`
/// stopped the loop before the seed map was exhausted.
#[derive(Debug)]
pub struct EnumerationResult {
    pub iaxps: Vec<Explanation>,
    pub cxps: Vec<Explanation>,
    pub complete: bool,
}

impl EnumerationResult {
    pub fn total(&self) -> usize {
        self.iaxps.len() + self.cxps.len()
    }
}

fn decode_seed(full: &RankMatrix, cnf: &SeedCnf, model: &Model) -> PartialRankMatrix {
    let (n, m) = (full.n(), full.m());
    let mut rows: Vec<Vec<Option<Candidate>>> = vec![vec![None; m]; n];
    for i in 0..n {
        for j in 0..m {
            let cell = CellIndex::new(i, j);
            if model.get(cnf.var_of(cell)) {
                rows[i][j] = Some(full.candidate_at(cell));
            }
        }
    }
    PartialRankMatrix::from_rows(&rows).expect("decoded seed inherits row uniqueness")
}

fn locked_indices(cells: &PartialRankMatrix) -> Vec<CellIndex> {
    cells.locked_cells().into_iter().map(|(c, _)| c).collect()
}

/// Enumerate every irredundant abductive explanation and every
/// contrastive explanation of `w ∈ winners(full)`. With `limit` the loop
/// stops once that many explanations have been produced.
pub fn enumerate_xps(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
    limit: Option<usize>,
) -> Result<EnumerationResult> {
    if !scoring::winners(full, rule).contains(&w) {
        return Err(Error::Precondition(format!(
            "candidate {} is not a winner of the profile",
            w.id()
        )));
    }
    let mut cnf = SeedCnf::new(full.n(), full.m());
    let mut result = EnumerationResult {
        iaxps: Vec::new(),
        cxps: Vec::new(),
        complete: true,
    };
    while let Some(model) = cnf.solve() {
        if limit.is_some_and(|cap| result.total() >= cap) {
            result.complete = false;
            break;
        }
        let seed = decode_seed(full, &cnf, &model);
        if scoring::is_necessary_winner(&seed, rule, w) {
            let xp = explain::find_iaxp_from(full, rule, w, &seed)?;
            cnf.add_blocking_up(&locked_indices(&xp.cells))?;
            result.iaxps.push(xp);
        } else {
            // the contrastive search shrinks the freed side of the seed
            let freed = complement(full, &seed)?;
            let xp = explain::find_cxp_from(full, rule, w, &freed)?;
            cnf.add_blocking_down(&locked_indices(&xp.cells))?;
            result.cxps.push(xp);
        }
    }
    Ok(result)
}

/// A cardinality-smallest irredundant abductive explanation.
///
/// Row margins add up across rows, so the optimum is an exact dynamic
/// program over per-row lock patterns; it degrades to the hitting-set
/// loop over the seed map only when the margin state space is too large
/// to tabulate.
pub fn find_smallest_iaxp(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
) -> Result<Explanation> {
    if !scoring::winners(full, rule).contains(&w) {
        return Err(Error::Precondition(format!(
            "candidate {} is not a winner of the profile",
            w.id()
        )));
    }
    if let Some(cells) = smallest::smallest_iaxp_cells(full, rule, w) {
        debug_assert!(scoring::is_necessary_winner(&cells, rule, w));
        return Ok(Explanation {
            kind: ExplanationKind::IAxp,
            winner: w,
            rule: rule.clone(),
            cells,
        });
    }
    find_smallest_iaxp_via_map(full, rule, w)
}

/// Literal hitting-set loop: minimum models of the seed map are minimum
/// hitting sets of the contrastive explanations discovered so far, so the
/// first one that keeps the winner necessary is a smallest irredundant
/// explanation. Exact but can need very many refinement rounds; used when
/// the dynamic program cannot run.
pub fn find_smallest_iaxp_via_map(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
) -> Result<Explanation> {
    if !scoring::winners(full, rule).contains(&w) {
        return Err(Error::Precondition(format!(
            "candidate {} is not a winner of the profile",
            w.id()
        )));
    }
    let mut cnf = SeedCnf::new(full.n(), full.m());
    loop {
        let model = cnf
            .minimum_model()
            .expect("the all-true model satisfies every seed-map clause");
        let seed = decode_seed(full, &cnf, &model);
        if scoring::is_necessary_winner(&seed, rule, w) {
            return Ok(Explanation {
                kind: ExplanationKind::IAxp,
                winner: w,
                rule: rule.clone(),
                cells: seed,
            });
        }
        let freed = complement(full, &seed)?;
        let cxp = explain::find_cxp_from(full, rule, w, &freed)?;
        cnf.add_blocking_down(&locked_indices(&cxp.cells))?;
    }
}

/// A cardinality-smallest contrastive explanation.
///
/// A release defeats the winner exactly when some single rival's total
/// margin goes negative, so the optimum decomposes per rival into a
/// one-dimensional dynamic program over per-row release patterns.
pub fn find_smallest_cxp(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
) -> Result<Explanation> {
    if !scoring::winners(full, rule).contains(&w) {
        return Err(Error::Precondition(format!(
            "candidate {} is not a winner of the profile",
            w.id()
        )));
    }
    if let Some(cells) = smallest::smallest_cxp_cells(full, rule, w) {
        return Ok(Explanation {
            kind: ExplanationKind::Cxp,
            winner: w,
            rule: rule.clone(),
            cells,
        });
    }
    find_smallest_cxp_via_map(full, rule, w)
}

/// Literal dual loop over a freed-cell map, blocking discovered abductive
/// explanations until a minimum model's release breaks the winner. Used
/// when the dynamic program cannot run.
pub fn find_smallest_cxp_via_map(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
) -> Result<Explanation> {
    if !scoring::winners(full, rule).contains(&w) {
        return Err(Error::Precondition(format!(
            "candidate {} is not a winner of the profile",
            w.id()
        )));
    }
    // The mirrored row clauses drop freed-sets that release exactly one
    // cell of a row; such a release never changes the extension set, so no
    // minimal contrastive explanation is lost, and every decoded residue
    // satisfies the abductive search's seed precondition.
    let mut cnf = SeedCnf::new_freed(full.n(), full.m());
    loop {
        let model = cnf
            .minimum_model()
            .expect("the all-true model satisfies every freed-map clause");
        let freed = decode_seed(full, &cnf, &model);
        let base = complement(full, &freed)?;
        if !scoring::is_necessary_winner(&base, rule, w) {
            return Ok(Explanation {
                kind: ExplanationKind::Cxp,
                winner: w,
                rule: rule.clone(),
                cells: freed,
            });
        }
        let iaxp = explain::find_iaxp_from(full, rule, w, &base)?;
        // future freed-sets must release at least one of these cells
        cnf.add_blocking_down(&locked_indices(&iaxp.cells))?;
    }
}

/// Exact smallest-explanation search by dynamic programming over per-row
/// lock patterns.
///
/// For every row and every subset of its cells, the winner's minimum and
/// each rival's maximum achievable row scores are fixed numbers, and the
/// totals are the row sums. A smallest irredundant abductive explanation
/// therefore minimizes the number of locked cells subject to every
/// rival's summed margin staying non-negative (patterns leaving exactly
/// one null per row excluded); a smallest contrastive explanation
/// minimizes released cells subject to some rival's summed margin going
/// negative. Cardinality-smallest witnesses are subset-minimal, so the
/// reconstructed matrices are genuine explanations.
mod smallest {
    use super::*;

    /// Caps keeping the margin-state tables in memory; beyond them the
    /// callers fall back to the seed-map loop.
    const MAX_STATES: usize = 2_000_000;
    const MAX_TABLE: usize = 24_000_000;
    const MAX_PATTERN_BITS: usize = 12;

    /// Per-rival margins `sigma_min(w) - sigma_max(c)` of one row under a
    /// lock pattern (set bit = cell locked at its profile value).
    fn row_margins(
        full: &RankMatrix,
        rule: &ScoringVector,
        w: Candidate,
        row: usize,
        pattern: u32,
    ) -> Vec<i64> {
        let m = full.m();
        let cells = full.row_raw(row);
        let mut free_lo = i64::MAX;
        let mut free_hi = i64::MIN;
        for j in 0..m {
            if pattern >> j & 1 == 0 {
                free_lo = free_lo.min(rule.weight(j));
                free_hi = free_hi.max(rule.weight(j));
            }
        }
        let bound = |c: Candidate| -> (i64, i64) {
            let j = cells.iter().position(|&v| v == c.id()).expect("complete row");
            if pattern >> j & 1 == 1 {
                (rule.weight(j), rule.weight(j))
            } else {
                (free_lo, free_hi)
            }
        };
        let w_lo = bound(w).0;
        (0..m as u32)
            .map(Candidate::new)
            .filter(|&c| c != w)
            .map(|c| w_lo - bound(c).1)
            .collect()
    }

    fn pattern_matrix(full: &RankMatrix, locked: &[u32]) -> PartialRankMatrix {
        let (n, m) = (full.n(), full.m());
        let mut rows: Vec<Vec<Option<Candidate>>> = vec![vec![None; m]; n];
        for i in 0..n {
            for j in 0..m {
                if locked[i] >> j & 1 == 1 {
                    rows[i][j] = Some(full.candidate_at(CellIndex::new(i, j)));
                }
            }
        }
        PartialRankMatrix::from_rows(&rows).expect("patterns select profile cells")
    }

    #[derive(Copy, Clone)]
    struct Back {
        pattern: u16,
        prev: u32,
    }

    const NO_BACK: Back = Back { pattern: u16::MAX, prev: u32::MAX };

    /// Smallest shaped locked-cell set keeping the winner necessary, or
    /// `None` when the tables would exceed the caps.
    pub(super) fn smallest_iaxp_cells(
        full: &RankMatrix,
        rule: &ScoringVector,
        w: Candidate,
    ) -> Option<PartialRankMatrix> {
        let (n, m) = (full.n(), full.m());
        if m > MAX_PATTERN_BITS {
            return None;
        }
        let gap = rule.weight(0) - rule.weight(m - 1);
        let reach = gap * n as i64;
        let width = usize::try_from(2 * reach + 1).ok()?;
        let dims = m - 1;
        let states = width.checked_pow(dims as u32)?;
        if states > MAX_STATES || states.checked_mul(n)? > MAX_TABLE {
            return None;
        }

        // candidate lock patterns; exactly one null per row is excluded
        let patterns: Vec<u32> = (0..1u32 << m)
            .filter(|p| p.count_ones() as usize != m - 1)
            .collect();
        let margins: Vec<Vec<Vec<i64>>> = (0..n)
            .map(|i| {
                patterns
                    .iter()
                    .map(|&p| row_margins(full, rule, w, i, p))
                    .collect()
            })
            .collect();

        const UNSET: u32 = u32::MAX;
        let origin: usize = {
            // all margins at zero
            let mut idx = 0usize;
            for _ in 0..dims {
                idx = idx * width + reach as usize;
            }
            idx
        };
        let mut cost = vec![UNSET; states];
        cost[origin] = 0;
        let mut back: Vec<Vec<Back>> = Vec::with_capacity(n);
        let mut decoded = vec![0i64; dims];
        for row in 0..n {
            let remaining = (n - row - 1) as i64 * gap;
            let mut next = vec![UNSET; states];
            let mut back_row = vec![NO_BACK; states];
            for state in 0..states {
                if cost[state] == UNSET {
                    continue;
                }
                let mut rest = state;
                for d in (0..dims).rev() {
                    decoded[d] = (rest % width) as i64 - reach;
                    rest /= width;
                }
                'patterns: for (pk, pattern) in patterns.iter().enumerate() {
                    let delta = &margins[row][pk];
                    let mut idx = 0usize;
                    for d in 0..dims {
                        // surplus beyond what later rows can consume is
                        // equivalent to the cap; irreparable deficits die
                        let v = (decoded[d] + delta[d]).min(reach);
                        if v < -remaining {
                            continue 'patterns;
                        }
                        idx = idx * width + (v + reach) as usize;
                    }
                    let c = cost[state] + pattern.count_ones();
                    if c < next[idx] {
                        next[idx] = c;
                        back_row[idx] = Back { pattern: pk as u16, prev: state as u32 };
                    }
                }
            }
            cost = next;
            back.push(back_row);
        }

        // feasible final states keep every margin non-negative; ties break
        // toward the smallest state index
        let mut best: Option<(u32, usize)> = None;
        for state in 0..states {
            if cost[state] == UNSET {
                continue;
            }
            let mut rest = state;
            let mut feasible = true;
            for _ in 0..dims {
                if (rest % width) as i64 - reach < 0 {
                    feasible = false;
                    break;
                }
                rest /= width;
            }
            if feasible && best.is_none_or(|(c, _)| cost[state] < c) {
                best = Some((cost[state], state));
            }
        }
        let (_, final_state) = best?;
        let mut chosen = vec![0u32; n];
        let mut state = final_state;
        for row in (0..n).rev() {
            let b = back[row][state];
            chosen[row] = patterns[b.pattern as usize];
            state = b.prev as usize;
        }
        Some(pattern_matrix(full, &chosen))
    }

    /// Smallest released-cell set letting some rival overtake the winner,
    /// or `None` when rows are too wide to tabulate release patterns.
    pub(super) fn smallest_cxp_cells(
        full: &RankMatrix,
        rule: &ScoringVector,
        w: Candidate,
    ) -> Option<PartialRankMatrix> {
        let (n, m) = (full.n(), full.m());
        if m > MAX_PATTERN_BITS {
            return None;
        }
        let gap = rule.weight(0) - rule.weight(m - 1);
        // floor one beyond the reachable range: a value at the floor plus
        // every later row's maximum gain still ends negative
        let floor = gap * n as i64 + 1;
        let width = usize::try_from(floor + gap * n as i64 + 1).ok()?;
        let all = (1u32 << m) - 1;

        let mut best: Option<(u32, Vec<u32>)> = None;
        for (rival_idx, _rival) in (0..m as u32)
            .map(Candidate::new)
            .filter(|&c| c != w)
            .enumerate()
        {
            // released-pattern margins: set bit = cell released
            let margins: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    (0..=all)
                        .map(|freed| row_margins(full, rule, w, i, all & !freed)[rival_idx])
                        .collect()
                })
                .collect();
            const UNSET: u32 = u32::MAX;
            let mut cost = vec![UNSET; width];
            cost[floor as usize] = 0;
            let mut back: Vec<Vec<Back>> = Vec::with_capacity(n);
            for row in 0..n {
                let remaining = (n - row - 1) as i64 * gap;
                let mut next = vec![UNSET; width];
                let mut back_row = vec![NO_BACK; width];
                for state in 0..width {
                    if cost[state] == UNSET {
                        continue;
                    }
                    let margin = state as i64 - floor;
                    for freed in 0..=all {
                        // a margin already deep enough stays equivalent at
                        // the floor; one the later rows cannot drag below
                        // zero dies
                        let v = (margin + margins[row][freed as usize]).max(-floor);
                        if v - remaining >= 0 {
                            continue;
                        }
                        let idx = (v + floor) as usize;
                        let c = cost[state] + freed.count_ones();
                        if c < next[idx] {
                            next[idx] = c;
                            back_row[idx] = Back { pattern: freed as u16, prev: state as u32 };
                        }
                    }
                }
                cost = next;
                back.push(back_row);
            }
            let mut local: Option<(u32, usize)> = None;
            for state in 0..width {
                if cost[state] != UNSET
                    && (state as i64) < floor
                    && local.is_none_or(|(c, _)| cost[state] < c)
                {
                    local = Some((cost[state], state));
                }
            }
            if let Some((c, final_state)) = local {
                if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                    let mut chosen = vec![0u32; n];
                    let mut state = final_state;
                    for row in (0..n).rev() {
                        let b = back[row][state];
                        chosen[row] = b.pattern as u32;
                        state = b.prev as usize;
                    }
                    best = Some((c, chosen));
                }
            }
        }
        best.map(|(_, released)| pattern_matrix(full, &released))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::{verify_cxp, verify_iaxp};
    use crate::oracle;
    use crate::profile::Profile;

    fn cand(id: u32) -> Candidate {
        Candidate::new(id)
    }

    fn ex1() -> RankMatrix {
        Profile::parse("4 4\nA B C D\nA B C D\nB C D A\nA D C B\nD C A B\n")
            .unwrap()
            .complete()
            .unwrap()
    }

    fn borda(m: usize) -> ScoringVector {
        ScoringVector::borda(m).unwrap()
    }

    fn id_profile(n: usize, m: usize) -> RankMatrix {
        let row: Vec<Candidate> = (0..m as u32).map(cand).collect();
        RankMatrix::from_rows(&vec![row; n]).unwrap()
    }

    #[test]
    fn example_profile_matches_subset_enumeration() {
        // the seed-map loop and the exhaustive subset search must agree
        // set-for-set on the whole example profile
        let full = ex1();
        let rule = borda(4);
        let result = enumerate_xps(&full, &rule, cand(0), None).unwrap();
        assert!(result.complete);
        let (brute_i, brute_c) = oracle::brute_xps(&full, &rule, cand(0)).unwrap();
        let as_set = |xs: &[Explanation]| {
            xs.iter().map(|x| x.cells.clone()).collect::<std::collections::HashSet<_>>()
        };
        assert_eq!(as_set(&result.iaxps), brute_i.iter().cloned().collect());
        assert_eq!(as_set(&result.cxps), brute_c.iter().cloned().collect());
        assert_eq!(result.iaxps.len(), 44);
        assert_eq!(result.cxps.len(), 33);
    }

    #[test]
    fn tiny_profile_enumeration() {
        let full = RankMatrix::from_rows(&[vec![cand(0), cand(1)]]).unwrap();
        let result = enumerate_xps(&full, &borda(2), cand(0), None).unwrap();
        assert_eq!(result.iaxps.len(), 1);
        assert_eq!(result.cxps.len(), 1);
        assert_eq!(result.iaxps[0].cells, full.to_partial());
        assert_eq!(result.cxps[0].cells, full.to_partial());
    }

    #[test]
    fn enumeration_is_verified_and_duplicate_free() {
        let full = ex1();
        let rule = borda(4);
        let result = enumerate_xps(&full, &rule, cand(0), None).unwrap();
        let mut seen = std::collections::HashSet::new();
        for xp in &result.iaxps {
            assert!(verify_iaxp(&full, &rule, cand(0), &xp.cells).unwrap());
            assert!(seen.insert(xp.cells.clone()));
        }
        for xp in &result.cxps {
            assert!(verify_cxp(&full, &rule, cand(0), &xp.cells).unwrap());
            assert!(seen.insert(xp.cells.clone()));
        }
    }

    #[test]
    fn limit_caps_total_output() {
        let full = ex1();
        let result = enumerate_xps(&full, &borda(4), cand(0), Some(5)).unwrap();
        assert_eq!(result.total(), 5);
        assert!(!result.complete);
    }

    #[test]
    fn identity_profile_contains_winner_first_pattern() {
        let full = id_profile(4, 4);
        let result = enumerate_xps(&full, &borda(4), cand(0), None).unwrap();
        let pattern = PartialRankMatrix::from_cells(
            4,
            4,
            &[(0, 0, cand(0)), (1, 0, cand(0)), (2, 0, cand(0))],
        )
        .unwrap();
        assert!(result.iaxps.iter().any(|xp| xp.cells == pattern));
    }

    #[test]
    fn smallest_iaxp_sizes() {
        assert_eq!(
            find_smallest_iaxp(&id_profile(4, 4), &borda(4), cand(0))
                .unwrap()
                .size(),
            3
        );
        let tiny = RankMatrix::from_rows(&[vec![cand(0), cand(1)]]).unwrap();
        assert_eq!(
            find_smallest_iaxp(&tiny, &borda(2), cand(0)).unwrap().size(),
            2
        );
        // matches the minimum over the enumerated family on the example
        let full = ex1();
        let rule = borda(4);
        let enumerated = enumerate_xps(&full, &rule, cand(0), None).unwrap();
        let min_size = enumerated.iaxps.iter().map(Explanation::size).min().unwrap();
        assert_eq!(
            find_smallest_iaxp(&full, &rule, cand(0)).unwrap().size(),
            min_size
        );
    }

    #[test]
    fn smallest_cxp_sizes() {
        let full = ex1();
        let rule = borda(4);
        let xp = find_smallest_cxp(&full, &rule, cand(0)).unwrap();
        assert_eq!(xp.size(), 2);
        assert!(verify_cxp(&full, &rule, cand(0), &xp.cells).unwrap());
        let tiny = RankMatrix::from_rows(&[vec![cand(0), cand(1)]]).unwrap();
        assert_eq!(
            find_smallest_cxp(&tiny, &borda(2), cand(0)).unwrap().size(),
            2
        );
        // identity profile: agrees with the brute-force minimum
        let id = id_profile(3, 3);
        let rule3 = borda(3);
        let (_, brute_cxps) = oracle::brute_xps(&id, &rule3, cand(0)).unwrap();
        let brute_min = brute_cxps.iter().map(PartialRankMatrix::size).min().unwrap();
        assert_eq!(
            find_smallest_cxp(&id, &rule3, cand(0)).unwrap().size(),
            brute_min
        );
    }

    #[test]
    fn non_winner_is_rejected() {
        let full = ex1();
        let rule = borda(4);
        assert!(enumerate_xps(&full, &rule, cand(1), None).is_err());
        assert!(find_smallest_iaxp(&full, &rule, cand(1)).is_err());
        assert!(find_smallest_cxp(&full, &rule, cand(1)).is_err());
    }

    #[test]
    fn exhausted_map_rejects_all_known_explanations() {
        // replaying the blocking clauses of a finished enumeration leaves
        // the seed map unsatisfiable
        let full = ex1();
        let result = enumerate_xps(&full, &borda(4), cand(0), None).unwrap();
        let mut cnf = SeedCnf::new(4, 4);
        for xp in &result.iaxps {
            cnf.add_blocking_up(&locked_indices(&xp.cells)).unwrap();
        }
        for xp in &result.cxps {
            cnf.add_blocking_down(&locked_indices(&xp.cells)).unwrap();
        }
        assert!(cnf.solve().is_none());
    }
}
