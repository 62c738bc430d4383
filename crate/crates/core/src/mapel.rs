//! Isomorphic swap distance between profiles and a classical 2D scaling
//! embedding for the map of elections.
//!
//! The distance minimizes, over every candidate relabeling, the cost of a
//! minimum-weight perfect matching between voters where matching two
//! ballots costs their swap (Kendall tau) distance. Relabelings are
//! enumerated exhaustively (guarded at m <= 8) and the voter matching is
//! the O(n^3) augmenting-path assignment algorithm.

use crate::error::{Error, Result};
use crate::profile::{Candidate, RankMatrix};

/// Hard cap on the candidate count for relabeling enumeration.
pub const MAX_RELABEL_M: usize = 8;

/// Number of discordant candidate pairs between two complete ballots.
pub fn swap_distance(a: &[Candidate], b: &[Candidate]) -> Result<usize> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::Dimension(format!(
            "ballots of length {m} and {}",
            b.len()
        )));
    }
    let positions = |ballot: &[Candidate]| -> Result<Vec<usize>> {
        let mut pos = vec![usize::MAX; m];
        for (j, c) in ballot.iter().enumerate() {
            if c.index() >= m || pos[c.index()] != usize::MAX {
                return Err(Error::Dimension("ballot is not a permutation".into()));
            }
            pos[c.index()] = j;
        }
        Ok(pos)
    };
    let pa = positions(a)?;
    let pb = positions(b)?;
    let mut count = 0;
    for x in 0..m {
        for y in x + 1..m {
            if (pa[x] < pa[y]) != (pb[x] < pb[y]) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Minimum-cost assignment on a square cost matrix; returns the column
/// matched to each row and the total cost. Augmenting paths with
/// potentials, O(n^3).
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> (Vec<usize>, i64) {
    let n = cost.len();
    assert!(n > 0 && cost.iter().all(|row| row.len() == n));
    let inf = i64::MAX / 4;
    // 1-indexed working arrays; p[j] is the row matched to column j
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    let mut total = 0i64;
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
        total += cost[p[j] - 1][j - 1];
    }
    (assignment, total)
}

fn positions_of(rows: &[Vec<u32>], m: usize) -> Vec<Vec<usize>> {
    rows.iter()
        .map(|row| {
            let mut pos = vec![0usize; m];
            for (j, &c) in row.iter().enumerate() {
                pos[c as usize] = j;
            }
            pos
        })
        .collect()
}

fn pair_cost(pa: &[usize], pb: &[usize]) -> i64 {
    let m = pa.len();
    let mut count = 0i64;
    for x in 0..m {
        for y in x + 1..m {
            if (pa[x] < pa[y]) != (pb[x] < pb[y]) {
                count += 1;
            }
        }
    }
    count
}

fn for_each_permutation(m: usize, visit: &mut impl FnMut(&[u32])) {
    let mut perm: Vec<u32> = (0..m as u32).collect();
    fn heap(k: usize, perm: &mut [u32], visit: &mut impl FnMut(&[u32])) {
        if k <= 1 {
            visit(perm);
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, visit);
            if k.is_multiple_of(2) {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
        }
    }
    heap(m, &mut perm, visit);
}

/// Minimum over all candidate relabelings of the minimum-cost voter
/// matching under per-ballot swap distance. Zero on isomorphic profiles.
pub fn isomorphic_distance(p1: &RankMatrix, p2: &RankMatrix) -> Result<usize> {
    let (n, m) = (p1.n(), p1.m());
    if p2.n() != n || p2.m() != m {
        return Err(Error::Dimension(format!(
            "profiles {}x{} and {}x{}",
            n,
            m,
            p2.n(),
            p2.m()
        )));
    }
    if m > MAX_RELABEL_M {
        return Err(Error::GuardExceeded(format!(
            "isomorphic distance enumerates m! relabelings; m={m} exceeds {MAX_RELABEL_M}"
        )));
    }
    let rows1: Vec<Vec<u32>> = (0..n).map(|i| p1.row_raw(i).to_vec()).collect();
    let rows2: Vec<Vec<u32>> = (0..n).map(|i| p2.row_raw(i).to_vec()).collect();
    let pos1 = positions_of(&rows1, m);
    let mut best = i64::MAX;
    for_each_permutation(m, &mut |sigma| {
        // relabel the second profile: candidate c becomes sigma[c]
        let relabeled: Vec<Vec<u32>> = rows2
            .iter()
            .map(|row| row.iter().map(|&c| sigma[c as usize]).collect())
            .collect();
        let pos2 = positions_of(&relabeled, m);
        let cost: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| pair_cost(&pos1[i], &pos2[j])).collect())
            .collect();
        let (_, total) = min_cost_assignment(&cost);
        best = best.min(total);
    });
    Ok(best as usize)
}

/// Pairwise isomorphic distances of a profile family.
pub fn distance_matrix(profiles: &[&RankMatrix]) -> Result<Vec<Vec<usize>>> {
    let k = profiles.len();
    let mut d = vec![vec![0usize; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let dist = isomorphic_distance(profiles[a], profiles[b])?;
            d[a][b] = dist;
            d[b][a] = dist;
        }
    }
    Ok(d)
}

/// Dominant eigenpair of a symmetric matrix restricted to the orthogonal
/// complement of `prior` eigenvectors (deflation by projection). The start
/// vector is salted per stage so consecutive stages never begin orthogonal
/// to their target direction.
fn dominant_eigenpair(b: &[Vec<f64>], prior: &[Vec<f64>], salt: u64) -> (f64, Vec<f64>) {
    use rand::{Rng, SeedableRng};
    let k = b.len();
    let norm = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>().sqrt();
    let project_out = |x: &mut Vec<f64>| {
        for p in prior {
            let dot: f64 = x.iter().zip(p).map(|(a, b)| a * b).sum();
            for (t, pi) in x.iter_mut().zip(p) {
                *t -= dot * pi;
            }
        }
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6d64_735f ^ salt);
    let mut v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() - 0.5).collect();
    project_out(&mut v);
    let n0 = norm(&v);
    if n0 < 1e-300 {
        return (0.0, vec![0.0; k]);
    }
    for t in v.iter_mut() {
        *t /= n0;
    }
    let mut lambda = f64::NAN;
    for _ in 0..5000 {
        let mut w = vec![0.0; k];
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = (0..k).map(|j| b[i][j] * v[j]).sum();
        }
        project_out(&mut w);
        let wn = norm(&w);
        if wn < 1e-300 {
            return (0.0, vec![0.0; k]);
        }
        let next_lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        for (t, wi) in v.iter_mut().zip(&w) {
            *t = wi / wn;
        }
        if lambda.is_finite() && (next_lambda - lambda).abs() <= 1e-14 * next_lambda.abs().max(1.0)
        {
            return (next_lambda, v);
        }
        lambda = next_lambda;
    }
    (lambda, v)
}

/// Classical metric scaling to two dimensions: double-center the squared
/// distances, pull the top two spectral directions out by power iteration
/// with deflation, and scale each by the root of its eigenvalue. The
/// output is centered at the origin and unique only up to rotation and
/// reflection.
pub fn mds_embed(d: &[Vec<f64>]) -> Result<Vec<[f64; 2]>> {
    let k = d.len();
    if k < 2 {
        return Err(Error::Precondition(
            "embedding needs at least two points".into(),
        ));
    }
    for (i, row) in d.iter().enumerate() {
        if row.len() != k {
            return Err(Error::Dimension("distance matrix must be square".into()));
        }
        if d[i][i] != 0.0 {
            return Err(Error::Precondition("nonzero diagonal".into()));
        }
        for j in 0..k {
            if d[i][j] < 0.0 || (d[i][j] - d[j][i]).abs() > 1e-9 {
                return Err(Error::Precondition(
                    "distances must be symmetric and non-negative".into(),
                ));
            }
        }
    }
    // B = -1/2 * C D^2 C with C the centering matrix
    let sq: Vec<Vec<f64>> = d
        .iter()
        .map(|row| row.iter().map(|&x| x * x).collect())
        .collect();
    let row_mean: Vec<f64> = sq.iter().map(|r| r.iter().sum::<f64>() / k as f64).collect();
    let grand = row_mean.iter().sum::<f64>() / k as f64;
    let b: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| -0.5 * (sq[i][j] - row_mean[i] - row_mean[j] + grand))
                .collect()
        })
        .collect();
    let (l1, v1) = dominant_eigenpair(&b, &[], 1);
    let (l2, v2) = dominant_eigenpair(&b, std::slice::from_ref(&v1), 2);
    let s1 = l1.max(0.0).sqrt();
    let s2 = l2.max(0.0).sqrt();
    Ok((0..k).map(|i| [v1[i] * s1, v2[i] * s2]).collect())
}
