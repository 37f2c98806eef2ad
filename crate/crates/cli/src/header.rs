use sha2::{Digest, Sha256};

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub seed: Option<u64>,
    pub config_hash: String,
}

impl Header {
    /// `config` is any canonical rendering of the settings that determine the output.
    pub fn new(seed: Option<u64>, config: &str) -> Self {
        Self {
            seed,
            config_hash: hex::encode(Sha256::digest(config.as_bytes())),
        }
    }

    fn fields(&self) -> [(&'static str, String); 3] {
        [
            ("selcls", env!("CARGO_PKG_VERSION").to_string()),
            ("seed", self.seed.map_or("none".into(), |s| s.to_string())),
            ("config", self.config_hash.clone()),
        ]
    }

    /// `# key value` lines.
    pub fn comment(&self) -> String {
        self.fields().iter().map(|(k, v)| format!("# {k} {v}\n")).collect()
    }

    /// Wraps a JSON document so the header travels with it.
    pub fn wrap_json(&self, body: &str) -> String {
        let [(_, version), (_, seed), (_, hash)] = self.fields();
        let seed = if self.seed.is_some() { seed } else { "null".into() };
        format!("{{\n\"selcls\": \"{version}\",\n\"seed\": {seed},\n\"config\": \"{hash}\",\n\"report\": {body}\n}}\n")
    }
}
