//! Profile and dataset file handling shared by the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use votexp_core::profile::Profile;
use votexp_core::RankMatrix;

pub struct LoadedProfile {
    pub id: String,
    pub culture: String,
    pub profile: Profile,
}

pub fn load_profile(path: &Path) -> Result<Profile> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read profile {}", path.display()))?;
    Ok(Profile::parse(&text)?)
}

pub fn load_complete_profile(path: &Path) -> Result<(Profile, RankMatrix)> {
    let profile = load_profile(path)?;
    let full = profile
        .complete()
        .with_context(|| format!("{} is not a complete profile", path.display()))?;
    Ok((profile, full))
}

/// Load every profile of a directory. A `manifest.csv` written by
/// `generate` pins ids and culture labels; without one, ids fall back to
/// file stems and the culture to the stem with its trailing `_NN` index
/// stripped.
pub fn load_profile_dir(dir: &Path) -> Result<Vec<LoadedProfile>> {
    let manifest = dir.join("manifest.csv");
    let mut out = Vec::new();
    if manifest.is_file() {
        let text = fs::read_to_string(&manifest)
            .with_context(|| format!("cannot read {}", manifest.display()))?;
        for (k, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                bail!("manifest line {} has {} fields, expected 5", k + 1, fields.len());
            }
            let profile = load_profile(&dir.join(fields[4]))?;
            out.push(LoadedProfile {
                id: fields[0].to_owned(),
                culture: fields[1].to_owned(),
                profile,
            });
        }
    } else {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("cannot list {}", dir.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "prof"))
            .collect();
        paths.sort();
        for path in paths {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("profile")
                .to_owned();
            let culture = stem
                .rsplit_once('_')
                .map(|(head, _)| head.to_owned())
                .unwrap_or_else(|| stem.clone());
            out.push(LoadedProfile {
                id: stem,
                culture,
                profile: load_profile(&path)?,
            });
        }
    }
    if out.is_empty() {
        bail!("no profiles found in {}", dir.display());
    }
    Ok(out)
}

pub fn write_profiles(
    dir: &Path,
    entries: &[(String, String, Profile)],
) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut manifest = String::from("id,culture,n,m,file\n");
    for (id, culture, profile) in entries {
        let file = format!("{id}.prof");
        fs::write(dir.join(&file), profile.to_text())
            .with_context(|| format!("cannot write {file}"))?;
        manifest.push_str(&format!(
            "{id},{culture},{},{},{file}\n",
            profile.matrix().n(),
            profile.matrix().m()
        ));
    }
    fs::write(dir.join("manifest.csv"), manifest).context("cannot write manifest.csv")?;
    Ok(())
}
