//! `votexp`: formal explanations for scoring-rule elections.

mod io;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use votexp_core::cultures::{
    default_dataset_spec, generate, parse_dataset_spec, stream_seed, CultureKind, CultureSpec,
};
use votexp_core::enumerate::{enumerate_xps, find_smallest_cxp, find_smallest_iaxp};
use votexp_core::explain::{
    find_cxp_from, find_iaxp_from, verify_cxp, verify_iaxp, Explanation,
};
use votexp_core::metrics::{analyze_profiles, summarize, AnalysisRow, AnalyzeInput};
use votexp_core::oracle::brute_xps;
use votexp_core::profile::{is_extension, Profile};
use votexp_core::scoring::ScoringVector;
use votexp_core::{mapel, parallel, Candidate, Error as CoreError, RankMatrix};

#[derive(Parser)]
#[command(
    name = "votexp",
    version,
    about = "Abductive and contrastive explanations for positional scoring rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExplainKind {
    /// One irredundant abductive explanation
    Axp,
    /// One contrastive explanation
    Cxp,
    /// A cardinality-smallest abductive explanation
    SmallestAxp,
    /// A cardinality-smallest contrastive explanation
    SmallestCxp,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one explanation for a winner of a complete profile
    Explain {
        #[arg(value_enum)]
        kind: ExplainKind,
        /// Profile file (text format, complete)
        #[arg(long)]
        profile: PathBuf,
        /// Rule spec: borda | plurality | kapproval:K | vector:w1,...,wm
        #[arg(long)]
        rule: String,
        /// Explained winner; defaults to the lexicographically smallest
        /// winner name
        #[arg(long)]
        winner: Option<String>,
        /// Partial profile restricting the search (axp/cxp only): the
        /// explanation is drawn from its non-null cells
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Cross-check the result against the verification predicates and,
        /// on small instances, the exhaustive oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Enumerate every abductive and contrastive explanation
    Enumerate {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        winner: Option<String>,
        /// Cap on the total number of explanations emitted
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        oracle: bool,
    },
    /// Generate profiles from statistical cultures
    Generate {
        /// One culture token (ic | iac | mallows:PHI | urn:ALPHA |
        /// conitzer | walsh | interval | cube | disc | circle | sphere |
        /// identity | antagonism | uniformity)
        #[arg(long, conflicts_with = "dataset")]
        culture: Option<String>,
        /// Generate a whole dataset; pass a spec file of `kind count`
        /// lines or omit the value for the built-in default
        #[arg(long, num_args = 0..=1, default_missing_value = "")]
        dataset: Option<String>,
        #[arg(short = 'n', long = "voters", default_value_t = 12)]
        voters: usize,
        #[arg(short = 'm', long = "candidates", default_value_t = 4)]
        candidates: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Profiles per culture in --culture mode
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output directory for profile files and manifest.csv
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-profile statistics and smallest-explanation sizes over a
    /// directory of profiles
    Analyze {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long, default_value = "borda")]
        rule: String,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Pairwise distances, 2D embedding, and scatter plots over a
    /// directory of profiles
    Map {
        #[arg(long)]
        profiles: PathBuf,
        /// Analysis CSV from `analyze`; adds a scatter colored by
        /// normalized smallest-explanation size
        #[arg(long)]
        analysis: Option<PathBuf>,
        /// Output path prefix
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 1 internal, 2 bad input or precondition, 3 guard exceeded.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::GuardExceeded(_)) => 3,
        Some(_) => 2,
        None => {
            let bad_input = err.chain().any(|c| c.is::<std::io::Error>())
                || err.downcast_ref::<InputError>().is_some();
            if bad_input {
                2
            } else {
                1
            }
        }
    }
}

/// Marker for user-input problems that are not core errors.
#[derive(Debug)]
struct InputError;

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid input")
    }
}

impl std::error::Error for InputError {}

fn input_error(message: String) -> anyhow::Error {
    anyhow!(InputError).context(message)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Explain { kind, profile, rule, winner, seed, format, oracle } => {
            cmd_explain(kind, &profile, &rule, winner.as_deref(), seed.as_deref(), format, oracle)
        }
        Command::Enumerate { profile, rule, winner, limit, oracle } => {
            cmd_enumerate(&profile, &rule, winner.as_deref(), limit, oracle)
        }
        Command::Generate { culture, dataset, voters, candidates, seed, count, out } => {
            cmd_generate(culture, dataset, voters, candidates, seed, count, &out)
        }
        Command::Analyze { profiles, rule, out, jobs, format } => {
            cmd_analyze(&profiles, &rule, &out, jobs.max(1), format)
        }
        Command::Map { profiles, analysis, out, jobs } => {
            cmd_map(&profiles, analysis.as_deref(), &out, jobs.max(1))
        }
    }
}

fn resolve_winner(
    profile: &Profile,
    full: &RankMatrix,
    rule: &ScoringVector,
    name: Option<&str>,
) -> Result<Candidate> {
    match name {
        Some(name) => profile
            .candidate(name)
            .ok_or_else(|| input_error(format!("unknown candidate {name:?}"))),
        None => Ok(votexp_core::metrics::default_winner(profile, full, rule)),
    }
}

fn print_explanation(xp: &Explanation, profile: &Profile, format: Format) {
    let record = xp.to_record(profile.names());
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string(&record).expect("serializable record"));
        }
        Format::Csv => {
            println!("voter,position,candidate");
            for cell in record.cells {
                println!("{},{},{}", cell.voter, cell.position, cell.candidate);
            }
        }
    }
}

fn cmd_explain(
    kind: ExplainKind,
    profile_path: &Path,
    rule_spec: &str,
    winner: Option<&str>,
    seed_path: Option<&Path>,
    format: Format,
    oracle: bool,
) -> Result<()> {
    let (profile, full) = io::load_complete_profile(profile_path)?;
    let rule = ScoringVector::parse(rule_spec, full.m())?;
    let w = resolve_winner(&profile, &full, &rule, winner)?;
    let seed = match seed_path {
        None => None,
        Some(path) => {
            if matches!(kind, ExplainKind::SmallestAxp | ExplainKind::SmallestCxp) {
                return Err(input_error(
                    "--seed applies only to the axp and cxp searches".into(),
                ));
            }
            let seed_profile = io::load_profile(path)?;
            if seed_profile.names() != profile.names() {
                return Err(input_error(
                    "seed candidate names must match the profile".into(),
                ));
            }
            let (_, matrix) = seed_profile.into_parts();
            if !is_extension(&matrix, full.as_partial())? {
                return Err(CoreError::Precondition(
                    "seed must be contained in the profile".into(),
                )
                .into());
            }
            Some(matrix)
        }
    };
    let xp = match kind {
        ExplainKind::Axp => match seed {
            Some(seed) => find_iaxp_from(&full, &rule, w, &seed)?,
            None => find_iaxp_from(&full, &rule, w, full.as_partial())?,
        },
        ExplainKind::Cxp => match seed {
            Some(seed) => find_cxp_from(&full, &rule, w, &seed)?,
            None => find_cxp_from(&full, &rule, w, full.as_partial())?,
        },
        ExplainKind::SmallestAxp => find_smallest_iaxp(&full, &rule, w)?,
        ExplainKind::SmallestCxp => find_smallest_cxp(&full, &rule, w)?,
    };
    if oracle {
        let verified = match kind {
            ExplainKind::Axp | ExplainKind::SmallestAxp => verify_iaxp(&full, &rule, w, &xp.cells)?,
            ExplainKind::Cxp | ExplainKind::SmallestCxp => verify_cxp(&full, &rule, w, &xp.cells)?,
        };
        if !verified {
            bail!("oracle: result failed its verification predicate");
        }
        if full.n() * full.m() <= votexp_core::oracle::MAX_CELLS {
            let (iaxps, cxps) = brute_xps(&full, &rule, w)?;
            let family = match kind {
                ExplainKind::Axp | ExplainKind::SmallestAxp => iaxps,
                ExplainKind::Cxp | ExplainKind::SmallestCxp => cxps,
            };
            if !family.contains(&xp.cells) {
                bail!("oracle: result missing from the exhaustive family");
            }
            eprintln!("oracle: verified and found in the exhaustive family");
        } else {
            eprintln!("oracle: verified (profile too large for subset enumeration)");
        }
    }
    print_explanation(&xp, &profile, format);
    Ok(())
}

fn cmd_enumerate(
    profile_path: &Path,
    rule_spec: &str,
    winner: Option<&str>,
    limit: Option<usize>,
    oracle: bool,
) -> Result<()> {
    let (profile, full) = io::load_complete_profile(profile_path)?;
    let rule = ScoringVector::parse(rule_spec, full.m())?;
    let w = resolve_winner(&profile, &full, &rule, winner)?;
    let result = enumerate_xps(&full, &rule, w, limit)?;
    if !result.complete {
        eprintln!("enumeration stopped at the --limit cap");
    }
    if oracle {
        if !result.complete {
            bail!("oracle: cannot cross-check a truncated enumeration");
        }
        let (iaxps, cxps) = brute_xps(&full, &rule, w)?;
        let same = |got: &[Explanation], want: &[votexp_core::PartialRankMatrix]| {
            let got: std::collections::HashSet<_> = got.iter().map(|x| x.cells.clone()).collect();
            let want: std::collections::HashSet<_> = want.iter().cloned().collect();
            got == want
        };
        if !same(&result.iaxps, &iaxps) || !same(&result.cxps, &cxps) {
            bail!("oracle: enumeration disagrees with the exhaustive family");
        }
        eprintln!("oracle: enumeration matches the exhaustive family set-for-set");
    }
    for xp in result.iaxps.iter().chain(&result.cxps) {
        println!("{}", serde_json::to_string(&xp.to_record(profile.names()))?);
    }
    println!(
        "{}",
        serde_json::json!({ "iaxp_count": result.iaxps.len(), "cxp_count": result.cxps.len() })
    );
    Ok(())
}

fn cmd_generate(
    culture: Option<String>,
    dataset: Option<String>,
    n: usize,
    m: usize,
    master_seed: u64,
    count: usize,
    out: &Path,
) -> Result<()> {
    let spec: Vec<(CultureKind, usize)> = match (&culture, &dataset) {
        (Some(token), None) => vec![(CultureKind::parse(token)?, count)],
        (None, Some(path)) if path.is_empty() => default_dataset_spec(),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read dataset spec {path}"))?;
            parse_dataset_spec(&text)?
        }
        _ => return Err(input_error("pass exactly one of --culture or --dataset".into())),
    };
    let names = Profile::default_names(m);
    let mut entries = Vec::new();
    for (kind, reps) in &spec {
        for rep in 0..*reps {
            let seed = stream_seed(master_seed, kind.index(), rep as u64);
            let matrix = generate(&CultureSpec { kind: kind.clone(), seed }, n, m)?;
            entries.push((
                format!("{}_{rep:02}", kind.label()),
                kind.label(),
                Profile::new(names.clone(), matrix.to_partial())?,
            ));
        }
    }
    io::write_profiles(out, &entries)?;
    println!("{}", serde_json::json!({ "profiles": entries.len(), "out": out.display().to_string() }));
    Ok(())
}

fn cmd_analyze(
    profiles_dir: &Path,
    rule_spec: &str,
    out: &Path,
    jobs: usize,
    format: Format,
) -> Result<()> {
    let loaded = io::load_profile_dir(profiles_dir)?;
    let inputs: Vec<AnalyzeInput> = loaded
        .into_iter()
        .map(|p| AnalyzeInput { id: p.id, culture: p.culture, profile: p.profile })
        .collect();
    let rows = analyze_profiles(&inputs, rule_spec, jobs)?;
    let mut csv = String::from(AnalysisRow::csv_header());
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv_row());
        csv.push('\n');
    }
    fs::write(out, csv).with_context(|| format!("cannot write {}", out.display()))?;
    let summary = summarize(&rows)?;
    match format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "profiles": summary.profiles,
                "spearman_siaxp_agreement": summary.spearman_siaxp_agreement,
                "spearman_siaxp_margin": summary.spearman_siaxp_margin,
            })
        ),
        Format::Csv => {
            println!("profiles,spearman_siaxp_agreement,spearman_siaxp_margin");
            println!(
                "{},{:.6},{:.6}",
                summary.profiles, summary.spearman_siaxp_agreement, summary.spearman_siaxp_margin
            );
        }
    }
    Ok(())
}

fn read_siaxp_norms(path: &Path, ids: &[String]) -> Result<Vec<f64>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| input_error("empty analysis file".into()))?
        .split(',')
        .collect();
    let id_col = header
        .iter()
        .position(|&h| h == "profile_id")
        .ok_or_else(|| input_error("analysis file lacks a profile_id column".into()))?;
    let norm_col = header
        .iter()
        .position(|&h| h == "siaxp_norm")
        .ok_or_else(|| input_error("analysis file lacks a siaxp_norm column".into()))?;
    let mut by_id = std::collections::HashMap::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let norm: f64 = fields
            .get(norm_col)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| input_error(format!("bad siaxp_norm in line {line:?}")))?;
        by_id.insert(fields[id_col].to_owned(), norm);
    }
    ids.iter()
        .map(|id| {
            by_id
                .get(id)
                .copied()
                .ok_or_else(|| input_error(format!("analysis file has no row for {id}")))
        })
        .collect()
}

fn cmd_map(profiles_dir: &Path, analysis: Option<&Path>, out: &Path, jobs: usize) -> Result<()> {
    let loaded = io::load_profile_dir(profiles_dir)?;
    let ids: Vec<String> = loaded.iter().map(|p| p.id.clone()).collect();
    let cultures: Vec<String> = loaded.iter().map(|p| p.culture.clone()).collect();
    let fulls: Vec<RankMatrix> = loaded
        .iter()
        .map(|p| {
            p.profile
                .complete()
                .with_context(|| format!("profile {} is not complete", p.id))
        })
        .collect::<Result<_>>()?;
    let k = fulls.len();

    // pairwise distances, parallel over the upper triangle
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .collect();
    let computed = parallel::map_indexed(pairs.len(), jobs, |p| {
        let (a, b) = pairs[p];
        mapel::isomorphic_distance(&fulls[a], &fulls[b])
    });
    let mut d = vec![vec![0usize; k]; k];
    for (p, dist) in computed.into_iter().enumerate() {
        let (a, b) = pairs[p];
        let dist = dist?;
        d[a][b] = dist;
        d[b][a] = dist;
    }

    let out_prefix = out.display().to_string();
    let mut distances_csv = String::from("id");
    for id in &ids {
        distances_csv.push(',');
        distances_csv.push_str(id);
    }
    distances_csv.push('\n');
    for (a, row) in d.iter().enumerate() {
        distances_csv.push_str(&ids[a]);
        for value in row {
            distances_csv.push_str(&format!(",{value}"));
        }
        distances_csv.push('\n');
    }
    fs::write(format!("{out_prefix}-distances.csv"), distances_csv)?;

    let dist_f64: Vec<Vec<f64>> = d
        .iter()
        .map(|row| row.iter().map(|&v| v as f64).collect())
        .collect();
    let points = mapel::mds_embed(&dist_f64)?;
    let mut embedding_csv = String::from("profile_id,x,y,culture\n");
    for i in 0..k {
        embedding_csv.push_str(&format!(
            "{},{:.6},{:.6},{}\n",
            ids[i], points[i][0], points[i][1], cultures[i]
        ));
    }
    fs::write(format!("{out_prefix}-embedding.csv"), embedding_csv)?;

    fs::write(
        format!("{out_prefix}-map.svg"),
        svg::scatter_by_category(&points, &cultures),
    )?;
    if let Some(analysis) = analysis {
        let norms = read_siaxp_norms(analysis, &ids)?;
        fs::write(
            format!("{out_prefix}-map-siaxp.svg"),
            svg::scatter_by_value(&points, &norms),
        )?;
    }
    println!("{}", serde_json::json!({ "profiles": k, "out": out_prefix }));
    Ok(())
}
