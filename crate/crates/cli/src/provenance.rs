//! Reproducibility header attached to every artifact: tool version, output
//! schema, the fully resolved configuration and its SHA-256.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Provenance {
    schema: String,
    config: Value,
    hash: String,
}

impl Provenance {
    pub fn new<T: Serialize>(command: &str, schema_version: u32, config: &T) -> Self {
        let config = serde_json::to_value(config).expect("configs serialize to JSON");
        // serde_json maps are ordered by key, so this text is canonical
        let text = config.to_string();
        Provenance { schema: format!("nbldpc.{command}/{schema_version}"), config, hash: sha256_hex(text.as_bytes()) }
    }

    /// `#` comment lines for text artifacts.
    pub fn comment_header(&self) -> String {
        format!(
            "# nbldpc {VERSION}\n# schema: {}\n# config: {}\n# config-sha256: {}\n",
            self.schema, self.config, self.hash
        )
    }

    /// JSON document wrapping `results`.
    pub fn envelope(&self, results: Value) -> Value {
        json!({
            "tool": "nbldpc",
            "version": VERSION,
            "schema": self.schema,
            "config": self.config,
            "config_sha256": self.hash,
            "results": results,
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_field_order() {
        let a = Provenance::new("x", 1, &json!({"b": 1, "a": [1.5, 2]}));
        let b = Provenance::new("x", 1, &json!({"a": [1.5, 2], "b": 1}));
        assert_eq!(a.hash, b.hash);
        assert_eq!(a.hash.len(), 64);
        assert!(a.comment_header().lines().all(|l| l.starts_with("# ")));
    }

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
