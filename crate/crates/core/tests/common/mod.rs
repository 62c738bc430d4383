//! Shared fixtures and fuzzing helpers for the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use votexp_core::profile::{Candidate, PartialRankMatrix, Profile, RankMatrix};
use votexp_core::scoring::ScoringVector;

pub const EX1_TEXT: &str = "4 4\nA B C D\nA B C D\nB C D A\nA D C B\nD C A B\n";
pub const X1_TEXT: &str = "4 4\nA B C D\nA B - -\n- C D -\nA D - -\n- - - B\n";
pub const X2_TEXT: &str = "4 4\nA B C D\n- B C D\nB - - -\nA D - -\n- - - B\n";
pub const X3_TEXT: &str = "4 4\nA B C D\nA - C D\nB - - -\nA D - -\n- - - B\n";
pub const REST_Y1_TEXT: &str = "4 4\nA B C D\n- B - D\nB C D A\nA D C B\nD C A B\n";

pub fn cand(id: u32) -> Candidate {
    Candidate::new(id)
}

pub fn ex1_profile() -> Profile {
    Profile::parse(EX1_TEXT).unwrap()
}

pub fn ex1() -> RankMatrix {
    ex1_profile().complete().unwrap()
}

pub fn x1() -> PartialRankMatrix {
    Profile::parse(X1_TEXT).unwrap().into_parts().1
}

pub fn x2() -> PartialRankMatrix {
    Profile::parse(X2_TEXT).unwrap().into_parts().1
}

pub fn x3() -> PartialRankMatrix {
    Profile::parse(X3_TEXT).unwrap().into_parts().1
}

pub fn y1() -> PartialRankMatrix {
    PartialRankMatrix::from_cells(4, 4, &[(0, 0, cand(0)), (0, 2, cand(2))]).unwrap()
}

pub fn rest_after_y1() -> PartialRankMatrix {
    Profile::parse(REST_Y1_TEXT).unwrap().into_parts().1
}

pub fn borda(m: usize) -> ScoringVector {
    ScoringVector::borda(m).unwrap()
}

pub fn plurality(m: usize) -> ScoringVector {
    ScoringVector::plurality(m).unwrap()
}

pub fn id_profile(n: usize, m: usize) -> RankMatrix {
    let row: Vec<Candidate> = (0..m as u32).map(cand).collect();
    RankMatrix::from_rows(&vec![row; n]).unwrap()
}

pub fn an_profile(n: usize, m: usize) -> RankMatrix {
    assert!(n.is_multiple_of(2));
    let row: Vec<Candidate> = (0..m as u32).map(cand).collect();
    let mut rev = row.clone();
    rev.reverse();
    let mut rows = vec![row; n / 2];
    rows.extend(vec![rev; n / 2]);
    RankMatrix::from_rows(&rows).unwrap()
}

pub fn random_profile(rng: &mut ChaCha8Rng, n: usize, m: usize) -> RankMatrix {
    use rand::seq::SliceRandom;
    let rows: Vec<Vec<Candidate>> = (0..n)
        .map(|_| {
            let mut row: Vec<Candidate> = (0..m as u32).map(cand).collect();
            row.shuffle(rng);
            row
        })
        .collect();
    RankMatrix::from_rows(&rows).unwrap()
}

/// Random sub-matrix of a complete profile, each cell kept with the given
/// probability.
pub fn random_partial(rng: &mut ChaCha8Rng, full: &RankMatrix, keep: f64) -> PartialRankMatrix {
    let rows: Vec<Vec<Option<Candidate>>> = (0..full.n())
        .map(|i| {
            full.ballot(i)
                .into_iter()
                .map(|c| (rng.random::<f64>() < keep).then_some(c))
                .collect()
        })
        .collect();
    PartialRankMatrix::from_rows(&rows).unwrap()
}

/// Deterministic completion: missing candidates fill the free positions in
/// ascending id order.
pub fn complete_arbitrarily(part: &PartialRankMatrix) -> RankMatrix {
    use votexp_core::profile::CellIndex;
    let (n, m) = (part.n(), part.m());
    let rows: Vec<Vec<Candidate>> = (0..n)
        .map(|i| {
            let row: Vec<Option<Candidate>> =
                (0..m).map(|j| part.get(CellIndex::new(i, j))).collect();
            let mut missing: Vec<Candidate> = (0..m as u32)
                .map(cand)
                .filter(|c| !row.contains(&Some(*c)))
                .collect();
            missing.reverse();
            row.iter()
                .map(|slot| slot.unwrap_or_else(|| missing.pop().expect("enough candidates")))
                .collect()
        })
        .collect();
    RankMatrix::from_rows(&rows).unwrap()
}

fn permutations(m: usize) -> Vec<Vec<Candidate>> {
    fn rec(m: usize, acc: &mut Vec<Candidate>, out: &mut Vec<Vec<Candidate>>) {
        if acc.len() == m {
            out.push(acc.clone());
            return;
        }
        for id in 0..m as u32 {
            let c = Candidate::new(id);
            if !acc.contains(&c) {
                acc.push(c);
                rec(m, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(m, &mut Vec::new(), &mut out);
    out
}

/// Every complete profile with the given dimensions.
pub fn all_profiles(n: usize, m: usize) -> Vec<RankMatrix> {
    let perms = permutations(m);
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    loop {
        if stack.len() == n {
            let rows: Vec<Vec<Candidate>> = stack.iter().map(|&k| perms[k].clone()).collect();
            out.push(RankMatrix::from_rows(&rows).unwrap());
            // advance
            while let Some(last) = stack.pop() {
                if last + 1 < perms.len() {
                    stack.push(last + 1);
                    break;
                }
            }
            if stack.is_empty() {
                return out;
            }
        } else {
            stack.push(0);
        }
    }
}
