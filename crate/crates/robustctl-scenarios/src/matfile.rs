//! Plain-text matrix files: one row per line, entries separated by
//! whitespace, `#` starts a comment. Blank lines separate matrices, so one
//! file can hold `A` followed by `B`.

use std::path::Path;

use robustctl::Mat;

use crate::ScenarioError;

/// Parses every matrix block in `text`.
pub fn parse_matrices(text: &str, path: &Path) -> Result<Vec<Mat>, ScenarioError> {
    let err = |line: usize, msg: String| ScenarioError::Parse { path: path.to_path_buf(), line, msg };
    let mut out = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut flush = |rows: &mut Vec<Vec<f64>>, line: usize| -> Result<(), ScenarioError> {
        if rows.is_empty() {
            return Ok(());
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(err(line, "rows of one matrix differ in length".into()));
        }
        out.push(Mat::from_fn(rows.len(), cols, |i, j| rows[i][j]));
        rows.clear();
        Ok(())
    };
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        last = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            // A comment-only line does not end a block; an empty one does.
            if raw.trim().is_empty() {
                flush(&mut rows, i + 1)?;
            }
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| err(i + 1, format!("not a number: `{tok}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    flush(&mut rows, last)?;
    Ok(out)
}

pub fn read_matrices(path: &Path) -> Result<Vec<Mat>, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    parse_matrices(&text, path)
}
