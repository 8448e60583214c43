//! The run configuration: a line-based `key = value` file with `#` comments
//! and space-separated integer lists.
//!
//! ```text
//! m_blocks = 2 3
//! n_blocks = 1
//! depth = 1            # optional
//! suites = monoid,poset
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Monoid,
    Poset,
    Sheaf,
    Complete,
    WedgeVee,
    Cone,
}

impl Suite {
    /// Every suite, in execution order.
    pub const ALL: [Suite; 6] = [
        Suite::Monoid,
        Suite::Poset,
        Suite::Sheaf,
        Suite::Complete,
        Suite::WedgeVee,
        Suite::Cone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Monoid => "monoid",
            Suite::Poset => "poset",
            Suite::Sheaf => "sheaf",
            Suite::Complete => "complete",
            Suite::WedgeVee => "wedge-vee",
            Suite::Cone => "cone",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

/// Parses a comma- or space-separated suite list; `all` selects every suite.
/// The result is deduplicated and in execution order.
pub fn parse_suites(text: &str) -> Result<Vec<Suite>, String> {
    let mut suites = Vec::new();
    for word in text.split([',', ' ', '\t']).filter(|w| !w.is_empty()) {
        if word == "all" {
            suites.extend(Suite::ALL);
        } else {
            suites.push(word.parse()?);
        }
    }
    if suites.is_empty() {
        return Err("no suites selected".into());
    }
    suites.sort();
    suites.dedup();
    Ok(suites)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Tsv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "tsv" => Ok(Format::Tsv),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub m_blocks: Vec<u32>,
    pub n_blocks: Vec<u32>,
    pub depth: usize,
    pub subset_budget: u64,
    pub sample_count: usize,
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub format: Format,
}

impl RunConfig {
    pub const DEFAULT_DEPTH: usize = 1;
    pub const DEFAULT_SUBSET_BUDGET: u64 = 1 << 20;
    pub const DEFAULT_SAMPLE_COUNT: usize = 10_000;

    pub fn new(m_blocks: Vec<u32>, n_blocks: Vec<u32>) -> Self {
        Self {
            m_blocks,
            n_blocks,
            depth: Self::DEFAULT_DEPTH,
            subset_budget: Self::DEFAULT_SUBSET_BUDGET,
            sample_count: Self::DEFAULT_SAMPLE_COUNT,
            seed: 0,
            suites: Suite::ALL.to_vec(),
            format: Format::Text,
        }
    }
}

fn blocks(value: &str) -> Result<Vec<u32>, String> {
    let list = value
        .split_whitespace()
        .map(|w| {
            w.parse::<u32>()
                .map_err(|_| format!("'{w}' is not a block size"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() {
        return Err("empty block list".into());
    }
    if list.contains(&0) {
        return Err("block sizes must be at least 1".into());
    }
    Ok(list)
}

fn number<T: FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("'{value}' is not a non-negative integer"))
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut m_blocks = None;
    let mut n_blocks = None;
    let mut config = RunConfig::new(Vec::new(), Vec::new());
    let mut seen = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ConfigError::Line { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if seen.contains(&key.to_string()) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        seen.push(key.to_string());
        match key {
            "m_blocks" => m_blocks = Some(blocks(value).map_err(err)?),
            "n_blocks" => n_blocks = Some(blocks(value).map_err(err)?),
            "depth" => config.depth = number(value).map_err(err)?,
            "subset_budget" => config.subset_budget = number(value).map_err(err)?,
            "sample_count" => config.sample_count = number(value).map_err(err)?,
            "seed" => config.seed = number(value).map_err(err)?,
            "suites" => config.suites = parse_suites(value).map_err(err)?,
            "format" => config.format = value.parse().map_err(err)?,
            other => return Err(err(format!("unknown key '{other}'"))),
        }
    }
    config.m_blocks = m_blocks.ok_or_else(|| ConfigError::Usage("m_blocks is required".into()))?;
    config.n_blocks = n_blocks.ok_or_else(|| ConfigError::Usage("n_blocks is required".into()))?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_blocks_and_defaults() {
        let c = parse_config_str("m_blocks = 2 3\nn_blocks = 1\n").unwrap();
        assert_eq!(c.m_blocks, vec![2, 3]);
        assert_eq!(c.n_blocks, vec![1]);
        assert_eq!(c.depth, 1);
        assert_eq!(c.subset_budget, 1 << 20);
        assert_eq!(c.sample_count, 10_000);
        assert_eq!(c.seed, 0);
        assert_eq!(c.suites, Suite::ALL.to_vec());
        assert_eq!(c.format, Format::Text);
    }

    #[test]
    fn comments_and_overrides() {
        let c = parse_config_str(
            "# instance\nm_blocks = 2 3  # M\nn_blocks = 1 1\nseed = 42\nsuites = cone, monoid\nformat = tsv\n",
        )
        .unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.suites, vec![Suite::Monoid, Suite::Cone]);
        assert_eq!(c.format, Format::Tsv);
    }

    #[test]
    fn zero_block_is_rejected() {
        let e = parse_config_str("m_blocks = 0\nn_blocks = 1\n").unwrap_err();
        assert!(matches!(e, ConfigError::Line { line: 1, .. }));
    }

    #[test]
    fn empty_file_is_rejected() {
        assert_eq!(
            parse_config_str("").unwrap_err(),
            ConfigError::Usage("m_blocks is required".into())
        );
    }

    #[test]
    fn unknown_and_malformed_lines() {
        let e = parse_config_str("m_blocks = 2\ncolour = red\n").unwrap_err();
        assert!(matches!(e, ConfigError::Line { line: 2, .. }));
        let e = parse_config_str("m_blocks 2\n").unwrap_err();
        assert!(matches!(e, ConfigError::Line { line: 1, .. }));
        let e = parse_config_str("m_blocks = 2\nm_blocks = 3\n").unwrap_err();
        assert!(matches!(e, ConfigError::Line { line: 2, .. }));
        let e = parse_config_str("m_blocks = 2\nn_blocks = 1\nsuites = \n").unwrap_err();
        assert!(matches!(e, ConfigError::Line { line: 3, .. }));
    }
}
