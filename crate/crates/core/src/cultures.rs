//! Seeded statistical-culture profile generators.
//!
//! Every generator is a deterministic function of `(kind, seed, n, m)`.
//! The stream is ChaCha8 seeded through `seed_from_u64`; dataset
//! generation derives per-profile seeds from a master seed with
//! splitmix64 over `(culture index << 32) | repetition`, so datasets are
//! reproducible from the documented recipe alone.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::profile::{Candidate, RankMatrix};

/// The preference distributions the generator knows, including the three
/// compass profiles (identity, antagonism, uniformity).
#[derive(Clone, Debug, PartialEq)]
pub enum CultureKind {
    /// Impartial culture: every ballot an independent uniform permutation.
    Ic,
    /// Impartial anonymous culture: uniform over anonymous profiles,
    /// sampled as a Pólya urn with one extra copy per draw.
    Iac,
    /// Mallows model at a normalized dispersion in `(0, 1]`; the raw
    /// dispersion is calibrated so the expected swap distance to the
    /// central ranking is `norm_phi` times that of a uniform ballot.
    Mallows { norm_phi: f64 },
    /// Pólya urn with contagion `alpha >= 0`: each draw returns
    /// `alpha * m!` copies of the drawn ballot to the urn.
    Urn { alpha: f64 },
    /// Single-peaked ballots from a uniformly random peak, growing
    /// outward with a fair coin per step.
    Conitzer,
    /// Uniform over all `2^(m-1)` single-peaked ballots on the axis.
    Walsh,
    /// Euclidean preferences from uniform points on `[0, 1]`.
    Interval,
    /// Euclidean preferences from uniform points in the unit 3-cube.
    Cube,
    /// Euclidean preferences from uniform points in the unit disc.
    Disc,
    /// Euclidean preferences from uniform points on the unit circle.
    Circle,
    /// Euclidean preferences from uniform points on the unit sphere.
    Sphere,
    /// All ballots identical (compass ID).
    Identity,
    /// Half the ballots identical, half their reverses (compass AN).
    Antagonism,
    /// Uniformly random ballots (compass UN); an impartial-culture draw.
    Uniformity,
}

impl CultureKind {
    /// All kinds in canonical order; the position doubles as the seed
    /// stream index.
    pub fn all() -> Vec<CultureKind> {
        vec![
            CultureKind::Ic,
            CultureKind::Iac,
            CultureKind::Mallows { norm_phi: 0.5 },
            CultureKind::Urn { alpha: 0.1 },
            CultureKind::Conitzer,
            CultureKind::Walsh,
            CultureKind::Interval,
            CultureKind::Cube,
            CultureKind::Disc,
            CultureKind::Circle,
            CultureKind::Sphere,
            CultureKind::Uniformity,
            CultureKind::Identity,
            CultureKind::Antagonism,
        ]
    }

    pub fn index(&self) -> u64 {
        match self {
            CultureKind::Ic => 0,
            CultureKind::Iac => 1,
            CultureKind::Mallows { .. } => 2,
            CultureKind::Urn { .. } => 3,
            CultureKind::Conitzer => 4,
            CultureKind::Walsh => 5,
            CultureKind::Interval => 6,
            CultureKind::Cube => 7,
            CultureKind::Disc => 8,
            CultureKind::Circle => 9,
            CultureKind::Sphere => 10,
            CultureKind::Uniformity => 11,
            CultureKind::Identity => 12,
            CultureKind::Antagonism => 13,
        }
    }

    /// Stable label used in file names, manifests, and CSV columns.
    pub fn label(&self) -> String {
        match self {
            CultureKind::Ic => "ic".into(),
            CultureKind::Iac => "iac".into(),
            CultureKind::Mallows { norm_phi } => format!("mallows_{norm_phi}"),
            CultureKind::Urn { alpha } => format!("urn_{alpha}"),
            CultureKind::Conitzer => "conitzer".into(),
            CultureKind::Walsh => "walsh".into(),
            CultureKind::Interval => "interval".into(),
            CultureKind::Cube => "cube".into(),
            CultureKind::Disc => "disc".into(),
            CultureKind::Circle => "circle".into(),
            CultureKind::Sphere => "sphere".into(),
            CultureKind::Uniformity => "uniformity".into(),
            CultureKind::Identity => "identity".into(),
            CultureKind::Antagonism => "antagonism".into(),
        }
    }

    /// Parse a culture token: a bare name, or `mallows:PHI` / `urn:ALPHA`.
    pub fn parse(token: &str) -> Result<Self> {
        let kind = match token {
            "ic" => CultureKind::Ic,
            "iac" => CultureKind::Iac,
            "conitzer" => CultureKind::Conitzer,
            "walsh" => CultureKind::Walsh,
            "interval" => CultureKind::Interval,
            "cube" => CultureKind::Cube,
            "disc" => CultureKind::Disc,
            "circle" => CultureKind::Circle,
            "sphere" => CultureKind::Sphere,
            "identity" => CultureKind::Identity,
            "antagonism" => CultureKind::Antagonism,
            "uniformity" => CultureKind::Uniformity,
            _ => {
                if let Some(phi) = token.strip_prefix("mallows:") {
                    let norm_phi: f64 = phi
                        .parse()
                        .map_err(|_| Error::InvalidCulture(format!("bad dispersion {phi:?}")))?;
                    CultureKind::Mallows { norm_phi }
                } else if let Some(alpha) = token.strip_prefix("urn:") {
                    let alpha: f64 = alpha
                        .parse()
                        .map_err(|_| Error::InvalidCulture(format!("bad contagion {alpha:?}")))?;
                    CultureKind::Urn { alpha }
                } else {
                    return Err(Error::InvalidCulture(format!("unknown culture {token:?}")));
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CultureKind::Mallows { norm_phi }
                if norm_phi.is_nan() || *norm_phi <= 0.0 || *norm_phi > 1.0 =>
            {
                Err(Error::InvalidCulture(format!(
                    "mallows dispersion must lie in (0, 1], got {norm_phi}"
                )))
            }
            CultureKind::Urn { alpha } if alpha.is_nan() || *alpha < 0.0 => {
                Err(Error::InvalidCulture(format!(
                    "urn contagion must be non-negative, got {alpha}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// A culture kind plus the seed that pins the draw.
#[derive(Clone, Debug, PartialEq)]
pub struct CultureSpec {
    pub kind: CultureKind,
    pub seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-profile seed for `(master, culture index, repetition)`.
pub fn stream_seed(master: u64, culture_index: u64, repetition: u64) -> u64 {
    splitmix64(master ^ splitmix64((culture_index << 32) | repetition))
}

fn uniform_permutation(rng: &mut ChaCha8Rng, m: usize) -> Vec<u32> {
    let mut row: Vec<u32> = (0..m as u32).collect();
    row.shuffle(rng);
    row
}

fn identity_row(m: usize) -> Vec<u32> {
    (0..m as u32).collect()
}

fn rows_to_matrix(rows: Vec<Vec<u32>>) -> RankMatrix {
    let typed: Vec<Vec<Candidate>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(Candidate::new).collect())
        .collect();
    RankMatrix::from_rows(&typed).expect("samplers emit permutations")
}

fn sample_ic(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<u32>> {
    (0..n).map(|_| uniform_permutation(rng, m)).collect()
}

/// Pólya urn: draw `t` picks a fresh uniform ballot with probability
/// `1 / (1 + t*alpha)` and otherwise copies a uniformly chosen earlier
/// draw. `alpha = 1/m!` is the impartial anonymous culture.
fn sample_urn(rng: &mut ChaCha8Rng, n: usize, m: usize, alpha: f64) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(n);
    for t in 0..n {
        let fresh = t == 0 || alpha == 0.0 || rng.random::<f64>() < 1.0 / (1.0 + t as f64 * alpha);
        if fresh {
            rows.push(uniform_permutation(rng, m));
        } else {
            let copy = rows[rng.random_range(0..t)].clone();
            rows.push(copy);
        }
    }
    rows
}

fn factorial_f64(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Expected swap distance of one repeated-insertion ballot at raw
/// dispersion `phi`.
fn mallows_expected_swaps(phi: f64, m: usize) -> f64 {
    (1..m)
        .map(|i| {
            let mut num = 0.0;
            let mut den = 0.0;
            let mut pw = 1.0;
            for k in 0..=i {
                num += k as f64 * pw;
                den += pw;
                pw *= phi;
            }
            num / den
        })
        .sum()
}

/// Raw dispersion whose expected swap distance is `norm_phi` times the
/// uniform expectation `C(m,2)/2`; bisection on the monotone expectation.
fn calibrate_mallows(norm_phi: f64, m: usize) -> f64 {
    if norm_phi >= 1.0 {
        return 1.0;
    }
    let pairs = (m * (m - 1) / 2) as f64;
    let target = norm_phi * pairs / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mallows_expected_swaps(mid, m) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Repeated insertion: walk the central ranking `0 < 1 < ... < m-1`; item
/// `i` jumps above `k` earlier items with probability proportional to
/// `phi^k`.
fn sample_mallows(rng: &mut ChaCha8Rng, n: usize, m: usize, norm_phi: f64) -> Vec<Vec<u32>> {
    let phi = calibrate_mallows(norm_phi, m);
    (0..n)
        .map(|_| {
            let mut ballot: Vec<u32> = Vec::with_capacity(m);
            for i in 0..m {
                let mut weights = Vec::with_capacity(i + 1);
                let mut pw = 1.0;
                let mut total = 0.0;
                for _ in 0..=i {
                    weights.push(pw);
                    total += pw;
                    pw *= phi;
                }
                let mut draw = rng.random::<f64>() * total;
                let mut jump = 0;
                for (k, w) in weights.iter().enumerate() {
                    draw -= w;
                    if draw <= 0.0 {
                        jump = k;
                        break;
                    }
                }
                ballot.insert(i - jump, i as u32);
            }
            ballot
        })
        .collect()
}

/// Random-peak single-peaked sampler: extend from the peak, taking the
/// nearest unused candidate on a uniformly chosen side.
fn sample_conitzer(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<u32>> {
    (0..n)
        .map(|_| {
            let peak = rng.random_range(0..m);
            let mut ballot = vec![peak as u32];
            let (mut lo, mut hi) = (peak, peak);
            while ballot.len() < m {
                let take_left = if lo == 0 {
                    false
                } else if hi == m - 1 {
                    true
                } else {
                    rng.random::<bool>()
                };
                if take_left {
                    lo -= 1;
                    ballot.push(lo as u32);
                } else {
                    hi += 1;
                    ballot.push(hi as u32);
                }
            }
            ballot
        })
        .collect()
}

/// Uniform single-peaked sampler: fill the ballot bottom-up, taking an
/// axis endpoint of the remaining interval with a fair coin; all
/// `2^(m-1)` single-peaked ballots are equally likely.
fn sample_walsh(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<u32>> {
    (0..n)
        .map(|_| {
            let mut ballot = vec![0u32; m];
            let (mut lo, mut hi) = (0usize, m - 1);
            for slot in (0..m).rev() {
                let pick_lo = if lo == hi { true } else { rng.random::<bool>() };
                if pick_lo {
                    ballot[slot] = lo as u32;
                    lo += 1;
                } else {
                    ballot[slot] = hi as u32;
                    hi -= 1;
                }
            }
            ballot
        })
        .collect()
}

#[derive(Copy, Clone)]
pub(crate) enum Domain {
    Interval,
    Cube,
    Disc,
    Circle,
    Sphere,
}

fn sample_point(rng: &mut ChaCha8Rng, domain: Domain) -> [f64; 3] {
    match domain {
        Domain::Interval => [rng.random::<f64>(), 0.0, 0.0],
        Domain::Cube => [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()],
        Domain::Disc => loop {
            let x = 2.0 * rng.random::<f64>() - 1.0;
            let y = 2.0 * rng.random::<f64>() - 1.0;
            if x * x + y * y <= 1.0 {
                return [x, y, 0.0];
            }
        },
        Domain::Circle => {
            let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            [theta.cos(), theta.sin(), 0.0]
        }
        Domain::Sphere => loop {
            // Marsaglia's method
            let a = 2.0 * rng.random::<f64>() - 1.0;
            let b = 2.0 * rng.random::<f64>() - 1.0;
            let s = a * a + b * b;
            if s < 1.0 {
                let r = (1.0 - s).sqrt();
                return [2.0 * a * r, 2.0 * b * r, 1.0 - 2.0 * s];
            }
        },
    }
}

fn distance2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum()
}

pub(crate) type EuclideanSample = (Vec<[f64; 3]>, Vec<[f64; 3]>, Vec<Vec<u32>>);

/// Candidate points first, then voter points; each ballot sorts the
/// candidates by distance from the voter, ties broken by id.
pub(crate) fn sample_euclidean_with_points(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    domain: Domain,
) -> EuclideanSample {
    let candidates: Vec<[f64; 3]> = (0..m).map(|_| sample_point(rng, domain)).collect();
    let voters: Vec<[f64; 3]> = (0..n).map(|_| sample_point(rng, domain)).collect();
    let rows = voters
        .iter()
        .map(|&v| {
            let mut ids: Vec<u32> = (0..m as u32).collect();
            ids.sort_by(|&a, &b| {
                distance2(candidates[a as usize], v)
                    .partial_cmp(&distance2(candidates[b as usize], v))
                    .expect("finite distances")
                    .then(a.cmp(&b))
            });
            ids
        })
        .collect();
    (candidates, voters, rows)
}

fn sample_antagonism(n: usize, m: usize) -> Vec<Vec<u32>> {
    let forward = identity_row(m);
    let mut reversed = forward.clone();
    reversed.reverse();
    let mut rows = vec![forward; n / 2];
    rows.extend(vec![reversed; n / 2]);
    rows
}

/// Draw one complete profile.
pub fn generate(spec: &CultureSpec, n: usize, m: usize) -> Result<RankMatrix> {
    spec.kind.validate()?;
    if n < 1 || m < 2 {
        return Err(Error::InvalidCulture(format!(
            "profiles need n >= 1 and m >= 2, got {n}x{m}"
        )));
    }
    if spec.kind == CultureKind::Antagonism && !n.is_multiple_of(2) {
        return Err(Error::InvalidCulture(
            "the antagonism profile needs an even number of voters".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rows = match &spec.kind {
        CultureKind::Ic | CultureKind::Uniformity => sample_ic(&mut rng, n, m),
        CultureKind::Iac => sample_urn(&mut rng, n, m, 1.0 / factorial_f64(m)),
        CultureKind::Urn { alpha } => sample_urn(&mut rng, n, m, *alpha),
        CultureKind::Mallows { norm_phi } => sample_mallows(&mut rng, n, m, *norm_phi),
        CultureKind::Conitzer => sample_conitzer(&mut rng, n, m),
        CultureKind::Walsh => sample_walsh(&mut rng, n, m),
        CultureKind::Interval => sample_euclidean_with_points(&mut rng, n, m, Domain::Interval).2,
        CultureKind::Cube => sample_euclidean_with_points(&mut rng, n, m, Domain::Cube).2,
        CultureKind::Disc => sample_euclidean_with_points(&mut rng, n, m, Domain::Disc).2,
        CultureKind::Circle => sample_euclidean_with_points(&mut rng, n, m, Domain::Circle).2,
        CultureKind::Sphere => sample_euclidean_with_points(&mut rng, n, m, Domain::Sphere).2,
        CultureKind::Identity => vec![identity_row(m); n],
        CultureKind::Antagonism => sample_antagonism(n, m),
    };
    Ok(rows_to_matrix(rows))
}

/// One generated profile of a dataset.
pub struct DatasetEntry {
    pub id: String,
    pub culture: String,
    pub profile: RankMatrix,
}

/// The default dataset: ten draws of each sampler culture plus the six
/// compass profiles (four uniformity draws, one identity, one antagonism).
pub fn default_dataset_spec() -> Vec<(CultureKind, usize)> {
    CultureKind::all()
        .into_iter()
        .map(|kind| {
            let count = match kind {
                CultureKind::Uniformity => 4,
                CultureKind::Identity | CultureKind::Antagonism => 1,
                _ => 10,
            };
            (kind, count)
        })
        .collect()
}

/// Parse a dataset spec: one `kind[:params] count` line per culture;
/// blank lines and `#` comments are ignored.
pub fn parse_dataset_spec(text: &str) -> Result<Vec<(CultureKind, usize)>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().expect("non-empty line");
        let count: usize = parts
            .next()
            .ok_or(Error::Parse {
                line: k + 1,
                message: "expected `kind count`".into(),
            })?
            .parse()
            .map_err(|_| Error::Parse {
                line: k + 1,
                message: "bad profile count".into(),
            })?;
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: k + 1,
                message: "trailing tokens after `kind count`".into(),
            });
        }
        out.push((CultureKind::parse(token)?, count));
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "dataset spec has no cultures".into(),
        });
    }
    Ok(out)
}

/// Generate a dataset; entry ids are `<label>_<rep>` and seeds derive
/// from the master seed by culture index and repetition.
pub fn generate_dataset(
    spec: &[(CultureKind, usize)],
    n: usize,
    m: usize,
    master_seed: u64,
) -> Result<Vec<DatasetEntry>> {
    let mut out = Vec::new();
    for (kind, count) in spec {
        for rep in 0..*count {
            let seed = stream_seed(master_seed, kind.index(), rep as u64);
            let profile = generate(&CultureSpec { kind: kind.clone(), seed }, n, m)?;
            out.push(DatasetEntry {
                id: format!("{}_{rep:02}", kind.label()),
                culture: kind.label(),
                profile,
            });
        }
    }
    Ok(out)
}
