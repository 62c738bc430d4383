//! Profile statistics and the analysis pipeline: agreement index, margin
//! of victory, Spearman rank correlation, and per-profile analysis rows.
//!
//! Statistics are exact integer/rational values; floating point only
//! appears at output and in the correlation step.

use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::enumerate;
use crate::error::{Error, Result};
use crate::parallel;
use crate::profile::{Candidate, Profile, RankMatrix};
use crate::scoring::{self, ScoringVector};

/// Normalized sum of absolute pairwise majority margins, in `[0, 1]`:
/// 1 on unanimous profiles, 0 on perfectly split ones. Each unordered
/// candidate pair counts once against the denominator `n * C(m, 2)`.
pub fn agreement_index(full: &RankMatrix) -> Ratio<i64> {
    let (n, m) = (full.n(), full.m());
    if m < 2 {
        return Ratio::from_integer(1);
    }
    // prefer[a][b] = number of voters ranking a above b
    let mut prefer = vec![vec![0i64; m]; m];
    for i in 0..n {
        let ballot = full.ballot(i);
        for x in 0..m {
            for y in x + 1..m {
                prefer[ballot[x].index()][ballot[y].index()] += 1;
            }
        }
    }
    let mut sum = 0i64;
    for a in 0..m {
        for b in a + 1..m {
            sum += (prefer[a][b] - prefer[b][a]).abs();
        }
    }
    let pairs = (m * (m - 1) / 2) as i64;
    Ratio::new(sum, n as i64 * pairs)
}

/// Score gap between the winner and the best-scoring other candidate;
/// zero exactly when the winner set is not a singleton.
pub fn margin_of_victory(full: &RankMatrix, rule: &ScoringVector) -> i64 {
    let mut scores = scoring::all_scores(full, rule);
    scores.sort_unstable_by(|a, b| b.cmp(a));
    scores[0] - scores[1]
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let k = values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN input"));
    let mut ranks = vec![0.0; k];
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // average rank for the tie group, 1-based
        let avg = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!(
            "correlating {} against {} values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate("need at least two observations".into()));
    }
    if xs.iter().any(|v| v.is_nan()) || ys.iter().any(|v| v.is_nan()) {
        return Err(Error::Degenerate("NaN observation".into()));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let k = xs.len() as f64;
    let mean = (k + 1.0) / 2.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..xs.len() {
        let dx = rx[i] - mean;
        let dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("constant input has no rank correlation".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// One profile queued for analysis.
pub struct AnalyzeInput {
    pub id: String,
    pub culture: String,
    pub profile: Profile,
}

/// One row of the analysis table.
#[derive(Clone, Debug)]
pub struct AnalysisRow {
    pub profile_id: String,
    pub culture: String,
    pub n: usize,
    pub m: usize,
    pub agreement: Ratio<i64>,
    pub margin_of_victory: i64,
    pub siaxp_size: usize,
}

impl AnalysisRow {
    pub fn siaxp_norm(&self) -> f64 {
        self.siaxp_size as f64 / (self.n * self.m) as f64
    }

    pub fn agreement_f64(&self) -> f64 {
        self.agreement.to_f64().expect("small rational")
    }

    pub fn csv_header() -> &'static str {
        "profile_id,culture,n,m,agreement,margin_of_victory,siaxp_size,siaxp_norm"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{},{},{:.6}",
            self.profile_id,
            self.culture,
            self.n,
            self.m,
            self.agreement_f64(),
            self.margin_of_victory,
            self.siaxp_size,
            self.siaxp_norm()
        )
    }
}

/// Correlations of the normalized smallest-explanation size against the
/// two profile statistics.
#[derive(Clone, Debug)]
pub struct AnalysisSummary {
    pub profiles: usize,
    pub spearman_siaxp_agreement: f64,
    pub spearman_siaxp_margin: f64,
}

/// Default winner of a profile: the lexicographically smallest name among
/// the rule's winners.
pub fn default_winner(profile: &Profile, full: &RankMatrix, rule: &ScoringVector) -> Candidate {
    scoring::winners(full, rule)
        .into_iter()
        .min_by(|&a, &b| profile.name(a).cmp(profile.name(b)))
        .expect("winner set is never empty")
}

/// Compute one analysis row per input, in input order, on up to `jobs`
/// threads.
pub fn analyze_profiles(
    inputs: &[AnalyzeInput],
    rule_spec: &str,
    jobs: usize,
) -> Result<Vec<AnalysisRow>> {
    let rows = parallel::map_indexed(inputs.len(), jobs, |k| -> Result<AnalysisRow> {
        let input = &inputs[k];
        let full = input.profile.complete()?;
        let rule = ScoringVector::parse(rule_spec, full.m())?;
        let w = default_winner(&input.profile, &full, &rule);
        let siaxp = enumerate::find_smallest_iaxp(&full, &rule, w)?;
        Ok(AnalysisRow {
            profile_id: input.id.clone(),
            culture: input.culture.clone(),
            n: full.n(),
            m: full.m(),
            agreement: agreement_index(&full),
            margin_of_victory: margin_of_victory(&full, &rule),
            siaxp_size: siaxp.size(),
        })
    });
    rows.into_iter().collect()
}

pub fn summarize(rows: &[AnalysisRow]) -> Result<AnalysisSummary> {
    let norm: Vec<f64> = rows.iter().map(AnalysisRow::siaxp_norm).collect();
    let agreement: Vec<f64> = rows.iter().map(AnalysisRow::agreement_f64).collect();
    let margin: Vec<f64> = rows.iter().map(|r| r.margin_of_victory as f64).collect();
    Ok(AnalysisSummary {
        profiles: rows.len(),
        spearman_siaxp_agreement: spearman(&norm, &agreement)?,
        spearman_siaxp_margin: spearman(&norm, &margin)?,
    })
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

    fn id_profile(n: usize, m: usize) -> RankMatrix {
        let row: Vec<Candidate> = (0..m as u32).map(cand).collect();
        RankMatrix::from_rows(&vec![row; n]).unwrap()
    }

    fn an_profile(n: usize, m: usize) -> RankMatrix {
        let row: Vec<Candidate> = (0..m as u32).map(cand).collect();
        let mut rev = row.clone();
        rev.reverse();
        let mut rows = vec![row; n / 2];
        rows.extend(vec![rev; n / 2]);
        RankMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn agreement_fixtures() {
        assert_eq!(agreement_index(&id_profile(5, 4)), Ratio::from_integer(1));
        assert_eq!(agreement_index(&an_profile(4, 4)), Ratio::from_integer(0));
        // only the (A, B) pair of the example profile has a majority margin
        assert_eq!(agreement_index(&ex1()), Ratio::new(2, 24));
    }

    #[test]
    fn agreement_is_invariant_under_voter_reordering() {
        let full = ex1();
        let rows: Vec<Vec<Candidate>> = [2, 0, 3, 1].iter().map(|&i| full.ballot(i)).collect();
        let shuffled = RankMatrix::from_rows(&rows).unwrap();
        assert_eq!(agreement_index(&full), agreement_index(&shuffled));
    }

    #[test]
    fn margin_fixtures() {
        let borda4 = ScoringVector::borda(4).unwrap();
        assert_eq!(margin_of_victory(&ex1(), &borda4), 1);
        assert_eq!(margin_of_victory(&id_profile(4, 4), &borda4), 4);
        let borda2 = ScoringVector::borda(2).unwrap();
        assert_eq!(margin_of_victory(&an_profile(2, 2), &borda2), 0);
    }

    #[test]
    fn spearman_fixtures() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        assert!((spearman(&x, &rev).unwrap() + 1.0).abs() < 1e-12);
        // displacement formula: 1 - 6*4/60
        let y = vec![2.0, 1.0, 4.0, 3.0];
        assert!((spearman(&x, &y).unwrap() - 0.6).abs() < 1e-12);
        // symmetry and monotone invariance
        assert_eq!(spearman(&x, &y).unwrap(), spearman(&y, &x).unwrap());
        let squashed: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        assert!((spearman(&x, &squashed).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn spearman_rejects_degenerate_input() {
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn spearman_handles_ties_with_average_ranks() {
        let x = vec![1.0, 1.0, 2.0, 3.0];
        let y = vec![1.0, 2.0, 3.0, 4.0];
        let rho = spearman(&x, &y).unwrap();
        // ranks of x: 1.5 1.5 3 4 against 1 2 3 4
        assert!((rho - 0.9486832980505138).abs() < 1e-9);
    }

    #[test]
    fn analysis_rows_and_csv_schema() {
        let text = "4 4\nA B C D\nA B C D\nA B C D\nA B C D\nA B C D\n";
        let inputs = vec![AnalyzeInput {
            id: "identity_00".into(),
            culture: "identity".into(),
            profile: Profile::parse(text).unwrap(),
        }];
        let rows = analyze_profiles(&inputs, "borda", 1).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.n, 4);
        assert_eq!(row.m, 4);
        assert_eq!(row.agreement, Ratio::from_integer(1));
        assert_eq!(row.siaxp_size, 3);
        assert_eq!(
            AnalysisRow::csv_header(),
            "profile_id,culture,n,m,agreement,margin_of_victory,siaxp_size,siaxp_norm"
        );
        let csv = row.to_csv_row();
        assert!(csv.starts_with("identity_00,identity,4,4,1.000000,4,3,"));
    }
}
