//! Parsing of test lists, block rules and score names.

use std::fs;

use lrdcp_core::lrd_sim::MarginalSpec;
use lrdcp_core::scores::{CustomScore, ScoreSpec};
use lrdcp_core::subsampling::{BlockRule, TestKind};

use crate::error::{CliError, CliResult};

/// `N` or `gamma:F`.
pub fn parse_block(s: &str) -> CliResult<BlockRule> {
    if let Some(g) = s.strip_prefix("gamma:") {
        let g: f64 = g
            .parse()
            .map_err(|_| CliError::Usage(format!("bad gamma in block rule '{s}'")))?;
        return Ok(BlockRule::Gamma(g));
    }
    s.parse::<usize>()
        .map(BlockRule::Fixed)
        .map_err(|_| CliError::Usage(format!("block must be N or gamma:F, got '{s}'")))
}

/// `wilcoxon`, `vdw`, `median` or `custom:PATH`.
pub fn parse_score(s: &str) -> CliResult<ScoreSpec> {
    match s {
        "wilcoxon" => Ok(ScoreSpec::wilcoxon()),
        "vdw" | "van-der-waerden" => Ok(ScoreSpec::van_der_waerden()),
        "median" => Ok(ScoreSpec::median()),
        _ => match s.strip_prefix("custom:") {
            Some(path) => read_custom_score(path),
            None => Err(CliError::Usage(format!(
                "unknown score '{s}' (expected wilcoxon, vdw, median or custom:PATH)"
            ))),
        },
    }
}

/// Comma-separated list of scores and `cusum`.
pub fn parse_tests(s: &str) -> CliResult<Vec<TestKind>> {
    let tests = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "cusum" => Ok(TestKind::Cusum),
            "wilcoxon" => Ok(TestKind::Wilcoxon),
            "vdw" | "van-der-waerden" => Ok(TestKind::Vdw),
            "median" => Ok(TestKind::Median),
            other => parse_score(other).map(TestKind::Custom),
        })
        .collect::<CliResult<Vec<_>>>()?;
    if tests.is_empty() {
        return Err(CliError::Usage("empty test list".into()));
    }
    Ok(tests)
}

pub fn parse_marginal(s: &str) -> CliResult<MarginalSpec> {
    match s {
        "normal" | "gaussian" => Ok(MarginalSpec::Normal),
        "pareto" => Ok(MarginalSpec::pareto_default()),
        "cauchy" => Ok(MarginalSpec::Cauchy),
        "chisq" => Ok(MarginalSpec::ChiSq1),
        _ => Err(CliError::Usage(format!(
            "unknown marginal '{s}' (expected normal, pareto, cauchy or chisq)"
        ))),
    }
}

/// Piecewise-linear score from a file of `x,h` lines. A non-numeric first
/// line is taken as a header; `#` starts a comment.
pub fn read_custom_score(path: &str) -> CliResult<ScoreSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [x, h] => x.parse::<f64>().ok().zip(h.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(p) => points.push(p),
            None if points.is_empty() && i == 0 => continue,
            None => {
                return Err(CliError::Ingest {
                    path: path.into(),
                    line: i as u64 + 1,
                    msg: format!("expected 'x,h', got '{raw}'"),
                })
            }
        }
    }
    let score = CustomScore::piecewise_linear(points)?;
    let name = std::path::Path::new(path)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("custom")
        .to_string();
    Ok(ScoreSpec::custom(name, score))
}
