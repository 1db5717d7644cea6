use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use super::{ExtractorConfig, ModuleMap};

/// Files whose presence makes a directory a build module.
pub const BUILD_DESCRIPTORS: &[&str] =
    &["build.gradle", "build.gradle.kts", "pom.xml", "build.xml"];

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("project root not found: {0}")]
    RootNotFound(PathBuf),
    #[error("project root not readable: {path}: {source}")]
    RootNotReadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn check_root(root: &Path) -> Result<(), ScanError> {
    if !root.is_dir() {
        return Err(ScanError::RootNotFound(root.to_path_buf()));
    }
    std::fs::read_dir(root).map_err(|source| ScanError::RootNotReadable {
        path: root.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn walk_error(root: &Path, err: walkdir::Error) -> ScanError {
    let path = err
        .path()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| root.to_path_buf());
    let source = err
        .into_io_error()
        .unwrap_or_else(|| std::io::Error::other("filesystem loop detected"));
    ScanError::RootNotReadable { path, source }
}

fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn walker<'a>(
    root: &'a Path,
    follow_symlinks: bool,
    exclude_dirs: &'a [String],
) -> impl Iterator<Item = walkdir::Result<walkdir::DirEntry>> + 'a {
    WalkDir::new(root)
        .follow_links(follow_symlinks)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(move |e| {
            e.depth() == 0
                || !e.file_type().is_dir()
                || !exclude_dirs
                    .iter()
                    .any(|pat| glob_match(pat, &e.file_name().to_string_lossy()))
        })
}

/// Lists project-relative source paths matching the include patterns,
/// sorted lexicographically.
pub fn scan_project(root: &Path, cfg: &ExtractorConfig) -> Result<Vec<String>, ScanError> {
    check_root(root)?;
    let mut out = Vec::new();
    for entry in walker(root, cfg.follow_symlinks, &cfg.exclude_dirs) {
        let entry = entry.map_err(|e| walk_error(root, e))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = relative(root, entry.path());
        if cfg.include_globs.iter().any(|g| glob_match(g, &rel)) {
            out.push(rel);
        }
    }
    out.sort();
    Ok(out)
}

/// Finds build modules: every directory holding a build descriptor.
pub fn detect_modules(root: &Path) -> Result<ModuleMap, ScanError> {
    check_root(root)?;
    let excluded = ExtractorConfig::default().exclude_dirs;
    let mut entries = BTreeMap::from([(String::new(), String::new())]);
    for entry in walker(root, false, &excluded) {
        let entry = entry.map_err(|e| walk_error(root, e))?;
        if entry.file_type().is_dir() {
            continue;
        }
        let name = entry.file_name().to_string_lossy();
        if BUILD_DESCRIPTORS.contains(&name.as_ref()) {
            let dir = entry
                .path()
                .parent()
                .map(|p| relative(root, p))
                .unwrap_or_default();
            entries.insert(dir.clone(), dir);
        }
    }
    Ok(ModuleMap { entries })
}

/// Matches `/`-separated `path` against `pattern`.
///
/// `**` as a whole segment matches any number of segments, `*` matches any
/// run of characters within a segment and `?` matches one character.
pub fn glob_match(pattern: &str, path: &str) -> bool {
    let pat: Vec<&str> = pattern.split('/').collect();
    let segs: Vec<&str> = path.split('/').collect();
    match_segments(&pat, &segs)
}

fn match_segments(pat: &[&str], segs: &[&str]) -> bool {
    match pat.split_first() {
        None => segs.is_empty(),
        Some((&"**", rest)) => (0..=segs.len()).any(|skip| match_segments(rest, &segs[skip..])),
        Some((first, rest)) => match segs.split_first() {
            Some((seg, seg_rest)) => match_segment(first, seg) && match_segments(rest, seg_rest),
            None => false,
        },
    }
}

fn match_segment(pat: &str, seg: &str) -> bool {
    let p: Vec<char> = pat.chars().collect();
    let s: Vec<char> = seg.chars().collect();
    // Iterative wildcard match with single-star backtracking.
    let (mut pi, mut si) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while si < s.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == s[si]) {
            pi += 1;
            si += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some((pi, si));
            pi += 1;
        } else if let Some((sp, ss)) = star {
            pi = sp + 1;
            si = ss + 1;
            star = Some((sp, ss + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}
