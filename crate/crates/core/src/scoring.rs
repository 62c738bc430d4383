//! Positional scoring rules, exact score bounds on partial matrices, the
//! necessary-winner test, and an incremental per-row score cache.
//!
//! For a partial row the minimum (maximum) achievable score of a free
//! candidate is the weight of the worst (best) null position in that row;
//! a locked candidate scores its locked weight exactly. Row values add up
//! across rows, so a candidate is a necessary winner iff its summed
//! minimum dominates every rival's summed maximum.

use crate::error::{Error, Result};
use crate::profile::{Candidate, CellIndex, PartialRankMatrix, RankMatrix};

/// Non-increasing integer weights `(w_1, ..., w_m)`; `w_1 > w_m` so the
/// induced rule is never constant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScoringVector {
    weights: Vec<i64>,
}

impl ScoringVector {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidRule(
                "weights must be non-increasing".into(),
            ));
        }
        match (weights.first(), weights.last()) {
            (Some(first), Some(last)) if first > last => Ok(ScoringVector { weights }),
            _ => Err(Error::InvalidRule(
                "weights must satisfy w_1 > w_m (a constant rule elects everyone)".into(),
            )),
        }
    }

    pub fn borda(m: usize) -> Result<Self> {
        Self::new((0..m).rev().map(|w| w as i64).collect())
    }

    pub fn plurality(m: usize) -> Result<Self> {
        Self::k_approval(m, 1)
    }

    pub fn k_approval(m: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= m {
            return Err(Error::InvalidRule(format!(
                "k-approval needs 1 <= k < m, got k={k}, m={m}"
            )));
        }
        Self::new((0..m).map(|p| i64::from(p < k)).collect())
    }

    /// Parse a rule spec: `borda`, `plurality`, `kapproval:K`, or
    /// `vector:w1,w2,...,wm`.
    pub fn parse(spec: &str, m: usize) -> Result<Self> {
        match spec {
            "borda" => Self::borda(m),
            "plurality" => Self::plurality(m),
            _ => {
                if let Some(k) = spec.strip_prefix("kapproval:") {
                    let k: usize = k
                        .parse()
                        .map_err(|_| Error::InvalidRule(format!("bad k in {spec:?}")))?;
                    Self::k_approval(m, k)
                } else if let Some(ws) = spec.strip_prefix("vector:") {
                    let weights = ws
                        .split(',')
                        .map(|t| {
                            t.trim()
                                .parse::<i64>()
                                .map_err(|_| Error::InvalidRule(format!("bad weight {t:?}")))
                        })
                        .collect::<Result<Vec<i64>>>()?;
                    if weights.len() != m {
                        return Err(Error::InvalidRule(format!(
                            "vector has {} weights for {m} candidates",
                            weights.len()
                        )));
                    }
                    Self::new(weights)
                } else {
                    Err(Error::InvalidRule(format!(
                        "unknown rule {spec:?} (expected borda, plurality, kapproval:K or vector:...)"
                    )))
                }
            }
        }
    }

    /// Canonical spec string for this vector.
    pub fn spec_string(&self) -> String {
        let m = self.weights.len();
        if self.weights.iter().rev().enumerate().all(|(k, &w)| w == k as i64) {
            return "borda".into();
        }
        let ones = self.weights.iter().take_while(|&&w| w == 1).count();
        if ones >= 1 && self.weights.iter().skip(ones).all(|&w| w == 0) {
            return if ones == 1 {
                "plurality".into()
            } else {
                format!("kapproval:{ones}")
            };
        }
        let body: Vec<String> = self.weights.iter().map(i64::to_string).collect();
        let _ = m;
        format!("vector:{}", body.join(","))
    }

    /// Weight of a 0-indexed position.
    pub fn weight(&self, position: usize) -> i64 {
        self.weights[position]
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }
}

fn check_dims(matrix_m: usize, rule: &ScoringVector) -> Result<()> {
    if matrix_m != rule.m() {
        return Err(Error::Dimension(format!(
            "matrix has {matrix_m} candidates but the rule has {} weights",
            rule.m()
        )));
    }
    Ok(())
}

/// Exact score of a candidate on a complete profile.
pub fn score(full: &RankMatrix, rule: &ScoringVector, c: Candidate) -> i64 {
    (0..full.n())
        .map(|i| rule.weight(full.position_of(i, c)))
        .sum()
}

/// All candidates with the highest score, ascending by id (non-resolute).
pub fn winners(full: &RankMatrix, rule: &ScoringVector) -> Vec<Candidate> {
    let scores = all_scores(full, rule);
    let top = *scores.iter().max().expect("m >= 1");
    scores
        .iter()
        .enumerate()
        .filter(|&(_, s)| *s == top)
        .map(|(c, _)| Candidate::new(c as u32))
        .collect()
}

pub(crate) fn all_scores(full: &RankMatrix, rule: &ScoringVector) -> Vec<i64> {
    let m = full.m();
    let mut scores = vec![0i64; m];
    for i in 0..full.n() {
        for (j, &c) in full.row_raw(i).iter().enumerate() {
            scores[c as usize] += rule.weight(j);
        }
    }
    scores
}

/// Per-row extreme weights of the null positions, if any.
fn free_extremes(part: &PartialRankMatrix, rule: &ScoringVector, i: usize) -> Option<(i64, i64)> {
    let null = part.null_id();
    let mut best: Option<(i64, i64)> = None;
    for (j, &v) in part.row_raw(i).iter().enumerate() {
        if v == null {
            let w = rule.weight(j);
            best = Some(match best {
                None => (w, w),
                Some((lo, hi)) => (lo.min(w), hi.max(w)),
            });
        }
    }
    best
}

fn row_bounds(part: &PartialRankMatrix, rule: &ScoringVector, i: usize, c: Candidate) -> (i64, i64) {
    if let Some(j) = part.row_raw(i).iter().position(|&v| v == c.id()) {
        let w = rule.weight(j);
        (w, w)
    } else {
        // A free candidate always has a free position available.
        let (lo, hi) = free_extremes(part, rule, i).expect("free candidate in a complete row");
        (lo, hi)
    }
}

/// Minimum score of `c` over all complete extensions. The bound is tight:
/// some extension attains it.
pub fn sigma_min(part: &PartialRankMatrix, rule: &ScoringVector, c: Candidate) -> i64 {
    (0..part.n()).map(|i| row_bounds(part, rule, i, c).0).sum()
}

/// Maximum score of `c` over all complete extensions (tight).
pub fn sigma_max(part: &PartialRankMatrix, rule: &ScoringVector, c: Candidate) -> i64 {
    (0..part.n()).map(|i| row_bounds(part, rule, i, c).1).sum()
}

/// Necessary-winner test: `w` wins (possibly tied) in every complete
/// extension iff `sigma_min(w) >= sigma_max(c)` for every rival `c`.
pub fn is_necessary_winner(part: &PartialRankMatrix, rule: &ScoringVector, w: Candidate) -> bool {
    let lo = sigma_min(part, rule, w);
    (0..part.m() as u32)
        .map(Candidate::new)
        .filter(|&c| c != w)
        .all(|c| lo >= sigma_max(part, rule, c))
}

/// Per-rival margins `delta(c) = sigma_min(w) - sigma_max(c)` and their sum.
///
/// `w` is a necessary winner iff every `delta(c) >= 0`; the total alone is
/// a diagnostic (non-negative totals do not imply the per-rival property).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginReport {
    pub winner: Candidate,
    pub deltas: Vec<(Candidate, i64)>,
    pub total: i64,
}

pub fn total_margin(part: &PartialRankMatrix, rule: &ScoringVector, w: Candidate) -> MarginReport {
    let lo = sigma_min(part, rule, w);
    let deltas: Vec<(Candidate, i64)> = (0..part.m() as u32)
        .map(Candidate::new)
        .filter(|&c| c != w)
        .map(|c| (c, lo - sigma_max(part, rule, c)))
        .collect();
    let total = deltas.iter().map(|&(_, d)| d).sum();
    MarginReport { winner: w, deltas, total }
}

/// Operation counters for complexity assertions.
#[derive(Clone, Debug, Default)]
pub struct CacheStats {
    /// Necessary-winner queries answered.
    pub nw_queries: u64,
    /// Cell mutations (locks plus frees).
    pub mutations: u64,
    /// Largest number of cell/candidate slots touched by one mutation.
    pub max_mutation_ops: u64,
    /// Largest number of candidate slots touched by one query.
    pub max_query_ops: u64,
}

/// Incremental min/max score bounds over a working partial matrix.
///
/// Holds per-row bounds for every candidate plus their global sums; a
/// lock or free of one cell re-derives only that row, so each mutation and
/// each necessary-winner query costs time linear in `m`, not `n*m`.
pub struct ScoreCache {
    rule: ScoringVector,
    matrix: PartialRankMatrix,
    /// Flattened n×m per-row bounds.
    row_min: Vec<i64>,
    row_max: Vec<i64>,
    /// Global sums per candidate.
    sum_min: Vec<i64>,
    sum_max: Vec<i64>,
    stats: CacheStats,
}

impl ScoreCache {
    pub fn build(part: &PartialRankMatrix, rule: &ScoringVector) -> Result<Self> {
        check_dims(part.m(), rule)?;
        let (n, m) = (part.n(), part.m());
        let mut cache = ScoreCache {
            rule: rule.clone(),
            matrix: part.clone(),
            row_min: vec![0; n * m],
            row_max: vec![0; n * m],
            sum_min: vec![0; m],
            sum_max: vec![0; m],
            stats: CacheStats::default(),
        };
        for i in 0..n {
            cache.refresh_row(i);
        }
        cache.stats = CacheStats::default();
        Ok(cache)
    }

    /// Recompute one row's bounds and fold the change into the global sums.
    /// Touches 2m slots.
    fn refresh_row(&mut self, i: usize) -> u64 {
        let m = self.matrix.m();
        let null = self.matrix.null_id();
        let mut ops = 0u64;
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        let mut locked_weight = vec![None::<i64>; m];
        for (j, &v) in self.matrix.row_raw(i).iter().enumerate() {
            ops += 1;
            let w = self.rule.weight(j);
            if v == null {
                lo = lo.min(w);
                hi = hi.max(w);
            } else {
                locked_weight[v as usize] = Some(w);
            }
        }
        for c in 0..m {
            ops += 1;
            let (new_lo, new_hi) = match locked_weight[c] {
                Some(w) => (w, w),
                None => (lo, hi),
            };
            let k = i * m + c;
            self.sum_min[c] += new_lo - self.row_min[k];
            self.sum_max[c] += new_hi - self.row_max[k];
            self.row_min[k] = new_lo;
            self.row_max[k] = new_hi;
        }
        ops
    }

    /// Lock a currently-null cell. Fails if the cell is occupied or the
    /// candidate already appears in the row.
    pub fn lock(&mut self, cell: CellIndex, c: Candidate) -> Result<()> {
        let null = self.matrix.null_id();
        if cell.voter >= self.matrix.n() || cell.position >= self.matrix.m() {
            return Err(Error::Dimension(format!("cell {cell:?} out of range")));
        }
        if self.matrix.cell_raw(cell.voter, cell.position) != null {
            return Err(Error::IllegalMutation(format!(
                "cell {cell:?} is already locked"
            )));
        }
        if self.matrix.row_contains(cell.voter, c.id()) {
            return Err(Error::IllegalMutation(format!(
                "candidate {} already locked in row {}",
                c.id(),
                cell.voter
            )));
        }
        self.matrix.set_cell_raw(cell.voter, cell.position, c.id());
        let ops = self.refresh_row(cell.voter);
        self.stats.mutations += 1;
        self.stats.max_mutation_ops = self.stats.max_mutation_ops.max(ops);
        Ok(())
    }

    /// Free a currently-locked cell, returning the candidate it held.
    pub fn free(&mut self, cell: CellIndex) -> Result<Candidate> {
        let null = self.matrix.null_id();
        if cell.voter >= self.matrix.n() || cell.position >= self.matrix.m() {
            return Err(Error::Dimension(format!("cell {cell:?} out of range")));
        }
        let v = self.matrix.cell_raw(cell.voter, cell.position);
        if v == null {
            return Err(Error::IllegalMutation(format!("cell {cell:?} is already null")));
        }
        self.matrix.set_cell_raw(cell.voter, cell.position, null);
        let ops = self.refresh_row(cell.voter);
        self.stats.mutations += 1;
        self.stats.max_mutation_ops = self.stats.max_mutation_ops.max(ops);
        Ok(Candidate::new(v))
    }

    /// Necessary-winner test from the cached global sums; touches m slots.
    pub fn is_necessary_winner(&mut self, w: Candidate) -> bool {
        let lo = self.sum_min[w.index()];
        let mut ops = 0u64;
        let mut ok = true;
        for c in 0..self.matrix.m() {
            ops += 1;
            if c != w.index() && lo < self.sum_max[c] {
                ok = false;
                break;
            }
        }
        self.stats.nw_queries += 1;
        self.stats.max_query_ops = self.stats.max_query_ops.max(ops);
        ok
    }

    pub fn sigma_min(&self, c: Candidate) -> i64 {
        self.sum_min[c.index()]
    }

    pub fn sigma_max(&self, c: Candidate) -> i64 {
        self.sum_max[c.index()]
    }

    pub fn matrix(&self) -> &PartialRankMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> PartialRankMatrix {
        self.matrix
    }

    pub fn stats(&self) -> &CacheStats {
        &self.stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn x1() -> PartialRankMatrix {
        Profile::parse("4 4\nA B C D\nA B - -\n- C D -\nA D - -\n- - - B\n")
            .unwrap()
            .into_parts()
            .1
    }

    fn rest_after_y1() -> PartialRankMatrix {
        Profile::parse("4 4\nA B C D\n- B - D\nB C D A\nA D C B\nD C A B\n")
            .unwrap()
            .into_parts()
            .1
    }

    #[test]
    fn scoring_vector_validation() {
        assert!(ScoringVector::new(vec![3, 2, 1, 0]).is_ok());
        assert!(ScoringVector::new(vec![1, 1, 0]).is_ok());
        assert!(ScoringVector::new(vec![1, 2, 0]).is_err());
        assert!(ScoringVector::new(vec![2, 2, 2]).is_err());
        assert!(ScoringVector::new(vec![5]).is_err());
        assert!(ScoringVector::new(vec![]).is_err());
        assert!(ScoringVector::k_approval(4, 4).is_err());
        assert!(ScoringVector::k_approval(4, 0).is_err());
        assert!(ScoringVector::borda(1).is_err());
    }

    #[test]
    fn rule_spec_parsing_and_canonical_strings() {
        let borda = ScoringVector::parse("borda", 4).unwrap();
        assert_eq!(borda.weights(), &[3, 2, 1, 0]);
        assert_eq!(borda.spec_string(), "borda");
        let plu = ScoringVector::parse("plurality", 3).unwrap();
        assert_eq!(plu.weights(), &[1, 0, 0]);
        assert_eq!(plu.spec_string(), "plurality");
        let ka = ScoringVector::parse("kapproval:2", 4).unwrap();
        assert_eq!(ka.weights(), &[1, 1, 0, 0]);
        assert_eq!(ka.spec_string(), "kapproval:2");
        let vec = ScoringVector::parse("vector:5,2,1,0", 4).unwrap();
        assert_eq!(vec.spec_string(), "vector:5,2,1,0");
        assert!(ScoringVector::parse("vector:1,0", 4).is_err());
        assert!(ScoringVector::parse("nonsense", 4).is_err());
    }

    #[test]
    fn borda_scores_on_example_profile() {
        let full = ex1();
        let borda = ScoringVector::borda(4).unwrap();
        assert_eq!(score(&full, &borda, cand(0)), 7);
        assert_eq!(score(&full, &borda, cand(1)), 5);
        assert_eq!(score(&full, &borda, cand(2)), 6);
        assert_eq!(score(&full, &borda, cand(3)), 6);
        assert_eq!(winners(&full, &borda), vec![cand(0)]);
    }

    #[test]
    fn plurality_zero_score() {
        let full = ex1();
        let plu = ScoringVector::plurality(4).unwrap();
        // C is never ranked first
        assert_eq!(score(&full, &plu, cand(2)), 0);
    }

    #[test]
    fn winners_of_symmetric_profiles() {
        let borda2 = ScoringVector::borda(2).unwrap();
        let a = cand(0);
        let b = cand(1);
        let id = RankMatrix::from_rows(&[vec![a, b], vec![a, b], vec![a, b], vec![a, b]]).unwrap();
        assert_eq!(winners(&id, &borda2), vec![a]);
        let an = RankMatrix::from_rows(&[vec![a, b], vec![a, b], vec![b, a], vec![b, a]]).unwrap();
        assert_eq!(winners(&an, &borda2), vec![a, b]);
    }

    #[test]
    fn example_score_bound_tables() {
        let borda = ScoringVector::borda(4).unwrap();
        let x1 = x1();
        assert_eq!(sigma_min(&x1, &borda, cand(0)), 7);
        assert_eq!(sigma_max(&x1, &borda, cand(1)), 6);
        assert_eq!(sigma_max(&x1, &borda, cand(2)), 7);
        assert_eq!(sigma_max(&x1, &borda, cand(3)), 7);

        let rest = rest_after_y1();
        assert_eq!(sigma_min(&rest, &borda, cand(0)), 5);
        assert_eq!(sigma_max(&rest, &borda, cand(1)), 5);
        assert_eq!(sigma_max(&rest, &borda, cand(2)), 8);
        assert_eq!(sigma_max(&rest, &borda, cand(3)), 6);
    }

    #[test]
    fn bounds_on_fully_null_matrix() {
        let borda = ScoringVector::borda(4).unwrap();
        let empty = PartialRankMatrix::empty(4, 4).unwrap();
        for c in 0..4 {
            assert_eq!(sigma_min(&empty, &borda, cand(c)), 0);
            assert_eq!(sigma_max(&empty, &borda, cand(c)), 12);
        }
        assert!(!is_necessary_winner(&empty, &borda, cand(0)));
    }

    #[test]
    fn necessary_winner_on_fixtures() {
        let borda = ScoringVector::borda(4).unwrap();
        assert!(is_necessary_winner(&x1(), &borda, cand(0)));
        assert!(!is_necessary_winner(&rest_after_y1(), &borda, cand(0)));
    }

    #[test]
    fn margin_of_fixture_and_single_ballots() {
        let borda = ScoringVector::borda(4).unwrap();
        let report = total_margin(&x1(), &borda, cand(0));
        assert_eq!(
            report.deltas,
            vec![(cand(1), 1), (cand(2), 0), (cand(3), 0)]
        );
        assert_eq!(report.total, 1);

        // empty single ballot: total margin -(m-1)^2
        for m in 2..=6usize {
            let empty = PartialRankMatrix::empty(1, m).unwrap();
            let rule = ScoringVector::borda(m).unwrap();
            let r = total_margin(&empty, &rule, cand(0));
            let m = m as i64;
            assert_eq!(r.total, -(m - 1) * (m - 1));
        }

        // [w . . .] single ballot: total margin 3
        let one = PartialRankMatrix::from_cells(1, 4, &[(0, 0, cand(0))]).unwrap();
        assert_eq!(total_margin(&one, &borda, cand(0)).total, 3);
    }

    #[test]
    fn cache_matches_fresh_computation_on_fixture() {
        let borda = ScoringVector::borda(4).unwrap();
        let mut cache = ScoreCache::build(&x1(), &borda).unwrap();
        assert!(cache.is_necessary_winner(cand(0)));
        assert_eq!(cache.sigma_min(cand(0)), 7);
        assert_eq!(cache.sigma_max(cand(1)), 6);

        // freeing the A in row 0 lets B overtake in some extension
        cache.free(CellIndex::new(0, 0)).unwrap();
        assert!(!cache.is_necessary_winner(cand(0)));
    }

    #[test]
    fn cache_lock_then_free_restores_state() {
        let borda = ScoringVector::borda(4).unwrap();
        let x1 = x1();
        let mut cache = ScoreCache::build(&x1, &borda).unwrap();
        cache.lock(CellIndex::new(0, 2), cand(2)).unwrap();
        assert_eq!(cache.free(CellIndex::new(0, 2)).unwrap(), cand(2));
        assert_eq!(cache.matrix(), &x1);
        let fresh = ScoreCache::build(&x1, &borda).unwrap();
        for c in 0..4 {
            assert_eq!(cache.sigma_min(cand(c)), fresh.sigma_min(cand(c)));
            assert_eq!(cache.sigma_max(cand(c)), fresh.sigma_max(cand(c)));
        }
    }

    #[test]
    fn cache_rejects_illegal_mutations() {
        let borda = ScoringVector::borda(4).unwrap();
        let mut cache = ScoreCache::build(&x1(), &borda).unwrap();
        // locking an occupied cell
        assert!(cache.lock(CellIndex::new(0, 0), cand(2)).is_err());
        // duplicate candidate in row
        assert!(cache.lock(CellIndex::new(0, 2), cand(0)).is_err());
        // freeing a null cell
        assert!(cache.free(CellIndex::new(3, 0)).is_err());
    }

    #[test]
    fn cache_mutation_cost_is_linear_in_m() {
        let borda = ScoringVector::borda(4).unwrap();
        let mut cache = ScoreCache::build(&x1(), &borda).unwrap();
        cache.free(CellIndex::new(0, 0)).unwrap();
        cache.lock(CellIndex::new(0, 0), cand(0)).unwrap();
        cache.is_necessary_winner(cand(0));
        let stats = cache.stats();
        assert_eq!(stats.mutations, 2);
        assert_eq!(stats.nw_queries, 1);
        assert!(stats.max_mutation_ops <= 2 * 4 + 2);
        assert!(stats.max_query_ops <= 4 + 2);
    }
}
