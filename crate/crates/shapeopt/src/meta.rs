//! Provenance stamped into every artifact.

use serde::{Deserialize, Serialize};

/// Version of the CSV, JSON-lines, checkpoint and SVG layouts.
pub const FORMAT_VERSION: u32 = 1;

/// `git describe`-style identifier of this build.
pub const BUILD_ID: &str = env!("SHAPEOPT_BUILD_ID");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    pub format_version: u32,
    pub config_hash: String,
    pub build: String,
}

impl Stamp {
    pub fn new(config_hash: &str) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            config_hash: config_hash.to_string(),
            build: BUILD_ID.to_string(),
        }
    }

    /// Stamp for artifacts not tied to a configuration.
    pub fn standalone() -> Self {
        Self::new("none")
    }

    /// `# shapeopt format_version=… config_hash=… build=… key=value…`
    pub fn comment_line(&self, extra: &[(&str, String)]) -> String {
        let mut s = format!(
            "# shapeopt format_version={} config_hash={} build={}",
            self.format_version, self.config_hash, self.build
        );
        for (k, v) in extra {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }
}

/// `key=value` pairs of a [`Stamp::comment_line`].
pub fn parse_comment_line(line: &str) -> Option<Vec<(String, String)>> {
    let rest = line.strip_prefix("# shapeopt")?;
    Some(
        rest.split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    )
}
