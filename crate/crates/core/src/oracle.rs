//! Brute-force reference implementations for tests and cross-checks.
//!
//! Everything here enumerates exhaustively and is guarded by hard size
//! limits; exceeding a guard is an error, never a silent truncation. None
//! of it is used on the fast path.

use crate::error::{Error, Result};
use crate::profile::{Candidate, PartialRankMatrix, RankMatrix};
use crate::scoring::ScoringVector;

/// Upper bound on complete extensions an exhaustive check may visit.
pub const MAX_EXTENSIONS: u128 = 1_000_000;
/// Upper bound on cells for subset enumeration.
pub const MAX_CELLS: usize = 16;

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Number of complete extensions of a partial matrix.
pub fn count_extensions(part: &PartialRankMatrix) -> u128 {
    (0..part.n())
        .map(|i| factorial(part.row_nulls(i)))
        .product()
}

/// Visit every complete extension as a raw row-major cell slice; the
/// visitor returns `false` to stop early. Returns `false` iff stopped.
fn for_each_extension(part: &PartialRankMatrix, visit: &mut impl FnMut(&[u32]) -> bool) -> bool {
    let (n, m) = (part.n(), part.m());
    let null = part.null_id();
    let mut free_pos: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut free_cand: Vec<Vec<u32>> = Vec::with_capacity(n);
    for i in 0..n {
        let row = part.row_raw(i);
        let pos: Vec<usize> = (0..m).filter(|&j| row[j] == null).collect();
        let cand: Vec<u32> = (0..m as u32).filter(|c| !row.contains(c)).collect();
        debug_assert_eq!(pos.len(), cand.len());
        free_pos.push(pos);
        free_cand.push(cand);
    }
    let mut scratch: Vec<u32> = part.raw().to_vec();

    fn rec(
        row: usize,
        slot: usize,
        m: usize,
        free_pos: &[Vec<usize>],
        free_cand: &mut [Vec<u32>],
        scratch: &mut [u32],
        visit: &mut impl FnMut(&[u32]) -> bool,
    ) -> bool {
        if row == free_pos.len() {
            return visit(scratch);
        }
        if slot == free_pos[row].len() {
            return rec(row + 1, 0, m, free_pos, free_cand, scratch, visit);
        }
        for k in slot..free_cand[row].len() {
            free_cand[row].swap(slot, k);
            scratch[row * m + free_pos[row][slot]] = free_cand[row][slot];
            let keep_going = rec(row, slot + 1, m, free_pos, free_cand, scratch, visit);
            free_cand[row].swap(slot, k);
            if !keep_going {
                return false;
            }
        }
        true
    }

    rec(0, 0, m, &free_pos, &mut free_cand, &mut scratch, visit)
}

fn beats_winner_somewhere(cells: &[u32], n: usize, m: usize, rule: &ScoringVector, w: Candidate) -> bool {
    let mut scores = vec![0i64; m];
    for i in 0..n {
        for j in 0..m {
            scores[cells[i * m + j] as usize] += rule.weight(j);
        }
    }
    let sw = scores[w.index()];
    scores.iter().any(|&s| s > sw)
}

/// Necessary-winner test by enumerating every complete extension.
pub fn brute_nw(part: &PartialRankMatrix, rule: &ScoringVector, w: Candidate) -> Result<bool> {
    let count = count_extensions(part);
    if count > MAX_EXTENSIONS {
        return Err(Error::GuardExceeded(format!(
            "{count} extensions exceed the {MAX_EXTENSIONS} oracle limit"
        )));
    }
    let (n, m) = (part.n(), part.m());
    let all_win = for_each_extension(part, &mut |cells| {
        !beats_winner_somewhere(cells, n, m, rule, w)
    });
    Ok(all_win)
}

fn matrix_from_mask(full: &RankMatrix, mask: u32) -> PartialRankMatrix {
    let (n, m) = (full.n(), full.m());
    let mut rows: Vec<Vec<Option<Candidate>>> = vec![vec![None; m]; n];
    for i in 0..n {
        for j in 0..m {
            if mask >> (i * m + j) & 1 == 1 {
                rows[i][j] = Some(full.candidate_at(crate::profile::CellIndex::new(i, j)));
            }
        }
    }
    PartialRankMatrix::from_rows(&rows).expect("cells of a rank matrix are row-unique")
}

/// Every row has zero or at least two nulls.
fn shaped(mask: u32, n: usize, m: usize) -> bool {
    (0..n).all(|i| {
        let row = (mask >> (i * m)) & ((1u32 << m) - 1);
        let locked = row.count_ones() as usize;
        locked != m - 1
    })
}

/// All irredundant abductive and all contrastive explanations of
/// `w ∈ winners(full)`, by literal enumeration of the 2^(nm) cell subsets.
///
/// A subset is a weak abductive explanation when every extension keeps `w`
/// winning (checked by exhaustive extension enumeration); irredundant
/// explanations are the subset-minimal weak ones among matrices whose rows
/// have zero or at least two nulls. Dually, a freed subset is a weak
/// contrastive explanation when its complement admits an extension where
/// `w` loses, and the explanations are the minimal such subsets.
pub fn brute_xps(
    full: &RankMatrix,
    rule: &ScoringVector,
    w: Candidate,
) -> Result<(Vec<PartialRankMatrix>, Vec<PartialRankMatrix>)> {
    let (n, m) = (full.n(), full.m());
    let cells = n * m;
    if cells > MAX_CELLS {
        return Err(Error::GuardExceeded(format!(
            "{cells} cells exceed the {MAX_CELLS}-cell subset-enumeration limit"
        )));
    }
    let per_mask = factorial(m).pow(n as u32);
    if per_mask > MAX_EXTENSIONS {
        return Err(Error::GuardExceeded(format!(
            "{per_mask} extensions per subset exceed the {MAX_EXTENSIONS} oracle limit"
        )));
    }

    let total = 1u32 << cells;
    let mut nw = vec![false; total as usize];
    for mask in 0..total {
        let part = matrix_from_mask(full, mask);
        nw[mask as usize] =
            for_each_extension(&part, &mut |cs| !beats_winner_somewhere(cs, n, m, rule, w));
    }

    let has_smaller = |mask: u32, good: &dyn Fn(u32) -> bool| -> bool {
        // proper submasks of `mask`
        let mut sub = mask.wrapping_sub(1) & mask;
        loop {
            if good(sub) {
                return true;
            }
            if sub == 0 {
                return false;
            }
            sub = sub.wrapping_sub(1) & mask;
        }
    };

    let mut iaxps = Vec::new();
    for mask in 0..total {
        if nw[mask as usize]
            && shaped(mask, n, m)
            && !has_smaller(mask, &|s| nw[s as usize] && shaped(s, n, m))
        {
            iaxps.push(matrix_from_mask(full, mask));
        }
    }

    let full_mask = total - 1;
    let weak_cxp = |freed: u32| !nw[(full_mask ^ freed) as usize];
    let mut cxps = Vec::new();
    for freed in 0..total {
        if weak_cxp(freed) && !has_smaller(freed, &weak_cxp) {
            cxps.push(matrix_from_mask(full, freed));
        }
    }
    Ok((iaxps, cxps))
}

/// Shape of a single ballot with a locked prefix of `k1` cells (the
/// designated winner first when `k1 > 0`), a locked suffix of `k2` cells,
/// and nulls in between. `k1 + k2 = m` normalizes to `(m, 0)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct NormalFormSpec {
    k1: usize,
    k2: usize,
    m: usize,
}

impl NormalFormSpec {
    pub fn new(k1: usize, k2: usize, m: usize) -> Result<Self> {
        if m == 0 || k1 + k2 > m {
            return Err(Error::Precondition(format!(
                "normal form needs k1 + k2 <= m, got k1={k1}, k2={k2}, m={m}"
            )));
        }
        if k1 + k2 == m {
            Ok(NormalFormSpec { k1: m, k2: 0, m })
        } else {
            Ok(NormalFormSpec { k1, k2, m })
        }
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Build the single-ballot matrix in normal form: `w` first when `k1 > 0`,
/// then the smallest other candidates filling the prefix; the largest
/// others fill the suffix.
pub fn make_normal_form(spec: NormalFormSpec, w: Candidate) -> Result<PartialRankMatrix> {
    let (k1, k2, m) = (spec.k1, spec.k2, spec.m);
    if w.index() >= m {
        return Err(Error::Dimension(format!(
            "winner {} outside 0..{m}",
            w.id()
        )));
    }
    let others: Vec<Candidate> = (0..m as u32)
        .map(Candidate::new)
        .filter(|&c| c != w)
        .collect();
    let mut cells = Vec::new();
    if k1 > 0 {
        cells.push((0usize, 0usize, w));
        for j in 1..k1 {
            cells.push((0, j, others[j - 1]));
        }
    }
    for (t, j) in (m - k2..m).enumerate() {
        cells.push((0, j, others[others.len() - k2 + t]));
    }
    PartialRankMatrix::from_cells(1, m, &cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{CellIndex, Profile};
    use crate::scoring;

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

    #[test]
    fn extension_counts() {
        assert_eq!(count_extensions(&x1()), 2 * 2 * 2 * 6);
        assert_eq!(
            count_extensions(&PartialRankMatrix::empty(2, 3).unwrap()),
            36
        );
        assert_eq!(count_extensions(ex1().as_partial()), 1);
    }

    #[test]
    fn brute_nw_on_fixtures() {
        let borda = ScoringVector::borda(4).unwrap();
        assert!(brute_nw(&x1(), &borda, cand(0)).unwrap());
        let empty = PartialRankMatrix::empty(2, 2).unwrap();
        let borda2 = ScoringVector::borda(2).unwrap();
        assert!(!brute_nw(&empty, &borda2, cand(0)).unwrap());
    }

    #[test]
    fn brute_nw_guard() {
        let empty = PartialRankMatrix::empty(6, 6).unwrap();
        let rule = ScoringVector::borda(6).unwrap();
        assert!(matches!(
            brute_nw(&empty, &rule, cand(0)),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn brute_xps_guard() {
        let rows: Vec<Vec<Candidate>> = (0..5)
            .map(|_| (0..4).map(cand).collect())
            .collect();
        let full = RankMatrix::from_rows(&rows).unwrap();
        let borda = ScoringVector::borda(4).unwrap();
        assert!(matches!(
            brute_xps(&full, &borda, cand(0)),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn brute_xps_on_tiny_profile() {
        // single ballot [A B]: the only irredundant abductive explanation is
        // the full ballot and the only contrastive one frees both cells
        let full = RankMatrix::from_rows(&[vec![cand(0), cand(1)]]).unwrap();
        let borda = ScoringVector::borda(2).unwrap();
        let (iaxps, cxps) = brute_xps(&full, &borda, cand(0)).unwrap();
        assert_eq!(iaxps, vec![full.to_partial()]);
        assert_eq!(cxps, vec![full.to_partial()]);
    }

    #[test]
    fn brute_xps_counts_on_example_profile() {
        let borda = ScoringVector::borda(4).unwrap();
        let (iaxps, cxps) = brute_xps(&ex1(), &borda, cand(0)).unwrap();
        assert_eq!(iaxps.len(), 44);
        assert_eq!(cxps.len(), 33);
        // the printed fixtures are among them
        assert!(iaxps.contains(&x1()));
        let y1 =
            PartialRankMatrix::from_cells(4, 4, &[(0, 0, cand(0)), (0, 2, cand(2))]).unwrap();
        assert!(cxps.contains(&y1));
    }

    #[test]
    fn explanation_sets_are_antichains_and_dual() {
        let borda = ScoringVector::borda(3).unwrap();
        let full = RankMatrix::from_rows(&[
            vec![cand(0), cand(1), cand(2)],
            vec![cand(1), cand(0), cand(2)],
        ])
        .unwrap();
        let w = scoring::winners(&full, &borda)[0];
        let (iaxps, cxps) = brute_xps(&full, &borda, w).unwrap();
        let as_set = |p: &PartialRankMatrix| {
            p.locked_cells()
                .into_iter()
                .map(|(c, _)| (c.voter, c.position))
                .collect::<std::collections::HashSet<_>>()
        };
        for (a, xa) in iaxps.iter().enumerate() {
            for (b, xb) in iaxps.iter().enumerate() {
                if a != b {
                    assert!(!as_set(xa).is_subset(&as_set(xb)));
                }
            }
        }
        for (a, ya) in cxps.iter().enumerate() {
            for (b, yb) in cxps.iter().enumerate() {
                if a != b {
                    assert!(!as_set(ya).is_subset(&as_set(yb)));
                }
            }
        }
        // every irredundant explanation meets every contrastive one
        for xa in &iaxps {
            for yb in &cxps {
                assert!(
                    !as_set(xa).is_disjoint(&as_set(yb)),
                    "abductive and contrastive explanations must intersect"
                );
            }
        }

        // full hitting-set duality holds between the unconstrained
        // subset-minimal abductive family and the contrastive family
        let (n, m) = (full.n(), full.m());
        let weak = |mask: u32| {
            brute_nw(&matrix_from_mask(&full, mask), &borda, w).unwrap()
        };
        let plain_axps: Vec<std::collections::HashSet<(usize, usize)>> = (0..1u32 << (n * m))
            .filter(|&mask| {
                weak(mask)
                    && (0..n * m).all(|b| mask >> b & 1 == 0 || !weak(mask ^ (1 << b)))
            })
            .map(|mask| {
                (0..n * m)
                    .filter(|&b| mask >> b & 1 == 1)
                    .map(|b| (b / m, b % m))
                    .collect()
            })
            .collect();
        let minimal_hitting_set =
            |set: &std::collections::HashSet<(usize, usize)>,
             family: &[std::collections::HashSet<(usize, usize)>]| {
                let hits = |s: &std::collections::HashSet<(usize, usize)>| {
                    family.iter().all(|member| !s.is_disjoint(member))
                };
                hits(set)
                    && set.iter().all(|cell| {
                        let mut reduced = set.clone();
                        reduced.remove(cell);
                        !hits(&reduced)
                    })
            };
        let cxp_sets: Vec<_> = cxps.iter().map(|y| as_set(y)).collect();
        for xa in &plain_axps {
            assert!(minimal_hitting_set(xa, &cxp_sets));
        }
        for yb in &cxp_sets {
            assert!(minimal_hitting_set(yb, &plain_axps));
        }
    }

    #[test]
    fn relabeling_permutes_explanations() {
        // swap candidates 1 and 2 everywhere; explanation counts are stable
        let borda = ScoringVector::borda(3).unwrap();
        let full = RankMatrix::from_rows(&[
            vec![cand(0), cand(1), cand(2)],
            vec![cand(2), cand(0), cand(1)],
        ])
        .unwrap();
        let swap = |c: Candidate| match c.id() {
            1 => cand(2),
            2 => cand(1),
            other => cand(other),
        };
        let relabeled: Vec<Vec<Candidate>> = (0..full.n())
            .map(|i| full.ballot(i).into_iter().map(swap).collect())
            .collect();
        let relabeled = RankMatrix::from_rows(&relabeled).unwrap();
        let w = scoring::winners(&full, &borda)[0];
        let (i1, c1) = brute_xps(&full, &borda, w).unwrap();
        let (i2, c2) = brute_xps(&relabeled, &borda, swap(w)).unwrap();
        assert_eq!(i1.len(), i2.len());
        assert_eq!(c1.len(), c2.len());
    }

    #[test]
    fn normal_form_construction() {
        let spec = NormalFormSpec::new(1, 0, 4).unwrap();
        let b = make_normal_form(spec, cand(0)).unwrap();
        assert_eq!(b.get(CellIndex::new(0, 0)), Some(cand(0)));
        assert_eq!(b.size(), 1);

        let spec = NormalFormSpec::new(0, 1, 4).unwrap();
        let b = make_normal_form(spec, cand(0)).unwrap();
        assert_eq!(b.size(), 1);
        assert_eq!(b.get(CellIndex::new(0, 3)), Some(cand(3)));

        // k1 + k2 = m collapses to a complete winner-first ballot
        let spec = NormalFormSpec::new(1, 3, 4).unwrap();
        assert_eq!(spec.k1(), 4);
        assert_eq!(spec.k2(), 0);
        let b = make_normal_form(spec, cand(2)).unwrap();
        assert!(b.is_complete());
        assert_eq!(b.get(CellIndex::new(0, 0)), Some(cand(2)));

        assert!(NormalFormSpec::new(3, 2, 4).is_err());
    }

    #[test]
    fn normal_form_margin_example() {
        let borda = ScoringVector::borda(4).unwrap();
        let b = make_normal_form(NormalFormSpec::new(1, 0, 4).unwrap(), cand(0)).unwrap();
        assert_eq!(scoring::total_margin(&b, &borda, cand(0)).total, 3);
    }
}
