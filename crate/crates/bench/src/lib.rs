//! Shared inputs for the benchmark targets.

use votexp_core::cultures::{generate, CultureKind, CultureSpec};
use votexp_core::profile::Profile;
use votexp_core::scoring::ScoringVector;
use votexp_core::{Candidate, RankMatrix};

pub const EXAMPLE_PROFILE: &str = "4 4\nA B C D\nA B C D\nB C D A\nA D C B\nD C A B\n";

pub fn example_profile() -> RankMatrix {
    Profile::parse(EXAMPLE_PROFILE)
        .expect("fixture parses")
        .complete()
        .expect("fixture is complete")
}

pub fn culture_profile(kind: CultureKind, seed: u64, n: usize, m: usize) -> RankMatrix {
    generate(&CultureSpec { kind, seed }, n, m).expect("valid culture parameters")
}

pub fn borda(m: usize) -> ScoringVector {
    ScoringVector::borda(m).expect("m >= 2")
}

pub fn first_winner(full: &RankMatrix, rule: &ScoringVector) -> Candidate {
    votexp_core::scoring::winners(full, rule)[0]
}
