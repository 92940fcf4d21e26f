//! Report rendering: a JSON envelope with the resolved config and its hash,
//! plus per-command CSV projections.

use anyhow::{Context, Result};
use hamvol_core::hash::fnv1a_64;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Render the canonical JSON report. The envelope embeds the resolved
/// config (execution details like worker count and output path are
/// deliberately excluded, so reruns with different workers hash — and
/// serialize — identically) and an FNV-1a hash of its canonical encoding.
pub fn render_json<C: Serialize, P: Serialize>(
    command: &str,
    config: &C,
    results: &P,
) -> Result<String> {
    let config_value = serde_json::to_value(config).context("serializing config")?;
    // Compact encoding with serde_json's sorted-map ordering is canonical.
    let canonical = serde_json::to_string(&config_value)?;
    let config_hash = format!("{:016x}", fnv1a_64(canonical.as_bytes()));

    #[derive(Serialize)]
    struct Envelope<'a, P: Serialize> {
        command: &'a str,
        version: &'a str,
        config: serde_json::Value,
        config_hash: String,
        results: &'a P,
    }

    let mut text = serde_json::to_string_pretty(&Envelope {
        command,
        version: VERSION,
        config: config_value,
        config_hash,
        results,
    })?;
    text.push('\n');
    Ok(text)
}

/// Full-precision scientific notation for CSV cells; round-trips exactly.
pub fn fmt_e(x: f64) -> String {
    format!("{x:e}")
}

/// Assemble a CSV document from a header and rows.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write to the output path, or stdout when none was given.
pub fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .with_context(|| format!("writing output to {}", path.display()))?;
        }
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .context("writing to stdout")?;
        }
    }
    Ok(())
}
