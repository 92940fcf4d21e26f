//! Epsilon-grid parsing: explicit comma lists or log-spaced `a..b` ranges.

use crate::error::usage;
use anyhow::Result;

pub const DEFAULT_RANGE_POINTS: usize = 25;

/// Parse `"0.05,0.1,0.2"`, `"1e-14..1e-4"` (log-spaced, `points` entries,
/// endpoints included), or a single value.
pub fn parse_grid(text: &str, points: Option<usize>) -> Result<Vec<f64>> {
    let text = text.trim();
    let grid = if let Some((a, b)) = text.split_once("..") {
        let lo: f64 = a
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad epsilon range start `{a}`")))?;
        let hi: f64 = b
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad epsilon range end `{b}`")))?;
        if !(lo > 0.0 && hi > lo) {
            return Err(usage(format!(
                "epsilon range needs 0 < start < end, got {lo}..{hi}"
            )));
        }
        let n = points.unwrap_or(DEFAULT_RANGE_POINTS);
        if n < 2 {
            return Err(usage("epsilon ranges need at least 2 grid points"));
        }
        let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
        (0..n)
            .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (n - 1) as f64).exp())
            .collect()
    } else {
        text.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("bad epsilon value `{tok}`")))
            })
            .collect::<Result<Vec<f64>>>()?
    };
    if grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(usage("epsilon values must lie in [0, 1]"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("epsilon grid must be strictly ascending"));
    }
    Ok(grid)
}

/// Parse a comma-separated list of positive integers (dimensions, chain
/// lengths).
pub fn parse_uint_list(text: &str, what: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("bad {what} `{tok}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_ranges() {
        assert_eq!(
            parse_grid("0.05,0.1,0.2", None).unwrap(),
            vec![0.05, 0.1, 0.2]
        );
        assert_eq!(parse_grid("0.3", None).unwrap(), vec![0.3]);
        let g = parse_grid("1e-4..1", None).unwrap();
        assert_eq!(g.len(), DEFAULT_RANGE_POINTS);
        assert!((g[0] - 1e-4).abs() < 1e-18);
        assert_eq!(*g.last().unwrap(), 1.0);
        let g = parse_grid("0.01..1", Some(25)).unwrap();
        assert!(g.iter().any(|e| (e - 0.1).abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(parse_grid("0.2,0.1", None).is_err());
        assert!(parse_grid("0..1", None).is_err());
        assert!(parse_grid("1e-3..2", None).is_err());
        assert!(parse_grid("abc", None).is_err());
    }
}
