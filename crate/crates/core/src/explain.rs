//! Single-explanation search and explanation verification.
//!
//! `find_cxp` walks the seed's cells in row-major order, locking each back
//! into the complement and rolling the lock back only when it would make
//! the winner necessary again; whatever stays free is a minimal
//! contrastive explanation. `find_iaxp` is the dual deletion walk, with an
//! irredundancy repair: the first time a free would leave a row with a
//! single null, the row is scanned for a second cell to free, and if none
//! works the original cell stays locked.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{complement, is_extension, Candidate, CellIndex, PartialRankMatrix, RankMatrix};
use crate::scoring::{self, CacheStats, ScoreCache, ScoringVector};

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ExplanationKind {
    Axp,
    IAxp,
    Cxp,
}

impl ExplanationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExplanationKind::Axp => "AXp",
            ExplanationKind::IAxp => "iAXp",
            ExplanationKind::Cxp => "CXp",
        }
    }
}

/// A computed explanation: the partial matrix of cells it talks about,
/// tagged with its kind and the winner it explains.
///
/// For abductive kinds the cells are the locked entries that keep the
/// winner necessary; for contrastive ones they are the entries whose
/// release lets the winner lose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub kind: ExplanationKind,
    pub winner: Candidate,
    pub rule: ScoringVector,
    pub cells: PartialRankMatrix,
}

impl Explanation {
    pub fn size(&self) -> usize {
        self.cells.size()
    }

    pub fn to_record(&self, names: &[String]) -> ExplanationRecord {
        ExplanationRecord {
            kind: self.kind.as_str().to_owned(),
            winner: names[self.winner.index()].clone(),
            rule: self.rule.spec_string(),
            size: self.size(),
            cells: self
                .cells
                .locked_cells()
                .into_iter()
                .map(|(cell, c)| CellRecord {
                    voter: cell.voter,
                    position: cell.position,
                    candidate: names[c.index()].clone(),
                })
                .collect(),
        }
    }
}

/// JSON form of an explanation; voters and positions are 0-indexed.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExplanationRecord {
    pub kind: String,
    pub winner: String,
    pub rule: String,
    pub size: usize,
    pub cells: Vec<CellRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CellRecord {
    pub voter: usize,
    pub position: usize,
    pub candidate: String,
}

fn require_winner(full: &RankMatrix, rule: &ScoringVector, w: Candidate) -> Result<()> {
    if w.index() >= full.m() {
        return Err(Error::Dimension(format!(
            "candidate {} outside 0..{}",
            w.id(),
            full.m()
        )));
    }
    if !scoring::winners(full, rule).contains(&w) {
        return Err(Error::Precondition(format!(
            "candidate {} is not a winner of the profile",
            w.id()
        )));
    }
    Ok(())
}

fn require_seed(full: &RankMatrix, seed: &PartialRankMatrix) -> Result<()> {
    if !is_extension(seed, full.as_partial())? {
        return Err(Error::Precondition(
            "seed must be contained in the explained profile".into(),
        ));
    }
    Ok(())
}

/// One contrastive explanation drawn from the non-null cells of `seed`.
///
/// Preconditions: `w` wins `full`, `seed ⊆ full`, and freeing all of the
/// seed already lets `w` lose (`w` is not a necessary winner of
/// `full ∖ seed`).
pub fn find_cxp_from(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
    seed: &PartialRankMatrix,
) -> Result<Explanation> {
    find_cxp_with_stats(full, rule, w, seed).map(|(xp, _)| xp)
}

/// `find_cxp_from` with the whole profile as the seed.
pub fn find_cxp(full: &RankMatrix, rule: &ScoringVector, w: Candidate) -> Result<Explanation> {
    find_cxp_from(full, rule, w, full.as_partial())
}

pub fn find_cxp_with_stats(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
    seed: &PartialRankMatrix,
) -> Result<(Explanation, CacheStats)> {
    require_winner(full, rule, w)?;
    require_seed(full, seed)?;
    let base = complement(full, seed)?;
    if scoring::is_necessary_winner(&base, rule, w) {
        return Err(Error::Precondition(
            "seed admits no contrastive explanation: the winner stays necessary with every seed cell freed"
                .into(),
        ));
    }
    let mut cache = ScoreCache::build(&base, rule)?;
    let mut freed: Vec<(usize, usize, Candidate)> = Vec::new();
    for (cell, c) in seed.locked_cells() {
        cache.lock(cell, c)?;
        if cache.is_necessary_winner(w) {
            cache.free(cell)?;
            freed.push((cell.voter, cell.position, c));
        }
    }
    let cells = PartialRankMatrix::from_cells(full.n(), full.m(), &freed)?;
    let stats = cache.stats().clone();
    Ok((
        Explanation {
            kind: ExplanationKind::Cxp,
            winner: w,
            rule: rule.clone(),
            cells,
        },
        stats,
    ))
}

/// One irredundant abductive explanation contained in `seed`.
///
/// Preconditions: `w` wins `full`, `seed ⊆ full`, `w` is a necessary
/// winner of the seed, and no seed row has exactly one null.
pub fn find_iaxp_from(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
    seed: &PartialRankMatrix,
) -> Result<Explanation> {
    find_iaxp_with_stats(full, rule, w, seed).map(|(xp, _)| xp)
}

/// `find_iaxp_from` with the whole profile as the seed.
pub fn find_iaxp(full: &RankMatrix, rule: &ScoringVector, w: Candidate) -> Result<Explanation> {
    find_iaxp_from(full, rule, w, full.as_partial())
}

pub fn find_iaxp_with_stats(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
    seed: &PartialRankMatrix,
) -> Result<(Explanation, CacheStats)> {
    require_winner(full, rule, w)?;
    require_seed(full, seed)?;
    if !scoring::is_necessary_winner(seed, rule, w) {
        return Err(Error::Precondition(
            "seed does not keep the winner necessary".into(),
        ));
    }
    let m = full.m();
    for i in 0..full.n() {
        if seed.row_locked(i) == m - 1 {
            return Err(Error::Precondition(format!(
                "seed row {i} has exactly one null entry"
            )));
        }
    }
    let mut cache = ScoreCache::build(seed, rule)?;
    for (cell, c) in seed.locked_cells() {
        if cache.matrix().get(cell).is_none() {
            // already freed by an earlier irredundancy repair
            continue;
        }
        cache.free(cell)?;
        if cache.matrix().row_locked(cell.voter) == m - 1 {
            ensure_irredundant(&mut cache, seed, w, cell)?;
        } else if !cache.is_necessary_winner(w) {
            cache.lock(cell, c)?;
        }
    }
    let stats = cache.stats().clone();
    Ok((
        Explanation {
            kind: ExplanationKind::IAxp,
            winner: w,
            rule: rule.clone(),
            cells: cache.into_matrix(),
        },
        stats,
    ))
}

/// Freeing `cell` left its row with a single null. Scan the row for a
/// second cell to free; if every choice breaks the necessary winner,
/// re-lock `cell` so the row stays complete.
fn ensure_irredundant(
    cache: &mut ScoreCache,
    seed: &PartialRankMatrix,
    w: Candidate,
    cell: CellIndex,
) -> Result<()> {
    let m = seed.m();
    for j2 in (0..m).filter(|&j| j != cell.position) {
        let other = CellIndex::new(cell.voter, j2);
        let c2 = cache
            .matrix()
            .get(other)
            .expect("every other cell of a single-null row is locked");
        cache.free(other)?;
        if cache.is_necessary_winner(w) {
            return Ok(());
        }
        cache.lock(other, c2)?;
    }
    let c = seed.get(cell).expect("cell came from the seed");
    cache.lock(cell, c)
}

/// Abductive-explanation check: `cand ⊆ full`, the winner is necessary,
/// and freeing any single locked cell breaks that.
pub fn verify_axp(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
    cand: &PartialRankMatrix,
) -> Result<bool> {
    if !is_extension(cand, full.as_partial())? {
        return Ok(false);
    }
    let mut cache = ScoreCache::build(cand, rule)?;
    if !cache.is_necessary_winner(w) {
        return Ok(false);
    }
    for (cell, c) in cand.locked_cells() {
        cache.free(cell)?;
        let survives = cache.is_necessary_winner(w);
        cache.lock(cell, c)?;
        if survives {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Irredundant-abductive check: additionally every row has zero or at
/// least two nulls, and minimality is taken over matrices of that shape:
/// single frees in rows that already have nulls, paired frees in complete
/// rows.
pub fn verify_iaxp(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
    cand: &PartialRankMatrix,
) -> Result<bool> {
    if !is_extension(cand, full.as_partial())? {
        return Ok(false);
    }
    let m = cand.m();
    if (0..cand.n()).any(|i| cand.row_nulls(i) == 1) {
        return Ok(false);
    }
    let mut cache = ScoreCache::build(cand, rule)?;
    if !cache.is_necessary_winner(w) {
        return Ok(false);
    }
    for i in 0..cand.n() {
        let row_cells: Vec<(CellIndex, Candidate)> = (0..m)
            .filter_map(|j| {
                let cell = CellIndex::new(i, j);
                cand.get(cell).map(|c| (cell, c))
            })
            .collect();
        if cand.row_nulls(i) == 0 {
            for a in 0..row_cells.len() {
                for b in a + 1..row_cells.len() {
                    let (ca, va) = row_cells[a];
                    let (cb, vb) = row_cells[b];
                    cache.free(ca)?;
                    cache.free(cb)?;
                    let survives = cache.is_necessary_winner(w);
                    cache.lock(cb, vb)?;
                    cache.lock(ca, va)?;
                    if survives {
                        return Ok(false);
                    }
                }
            }
        } else {
            for &(cell, c) in &row_cells {
                cache.free(cell)?;
                let survives = cache.is_necessary_winner(w);
                cache.lock(cell, c)?;
                if survives {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Contrastive-explanation check: with the candidate cells freed the
/// winner is no longer necessary, and restoring any single cell repairs
/// that.
pub fn verify_cxp(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
    cand: &PartialRankMatrix,
) -> Result<bool> {
    if !is_extension(cand, full.as_partial())? {
        return Ok(false);
    }
    if !scoring::winners(full, rule).contains(&w) {
        return Ok(false);
    }
    let base = complement(full, cand)?;
    let mut cache = ScoreCache::build(&base, rule)?;
    if cache.is_necessary_winner(w) {
        return Ok(false);
    }
    for (cell, c) in cand.locked_cells() {
        cache.lock(cell, c)?;
        let repaired = cache.is_necessary_winner(w);
        cache.free(cell)?;
        if !repaired {
            return Ok(false);
        }
    }
    Ok(true)
}
