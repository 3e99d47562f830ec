//! Run configuration: a key-value file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sggraph::{EnergyModel, Vertex, Window};
use thiserror::Error;

pub const SEED_ENV: &str = "SGGRAPH_SEED";
pub const DEFAULT_SEED: u64 = sggraph::validation::DEFAULT_SEED;

/// Keys accepted in config files; flag names without the leading dashes.
pub const KEYS: [&str; 17] = [
    "model", "h0", "h1", "beta", "beta-tilde", "window", "samples", "horizon", "burn", "seed", "max-rect",
    "max-depth", "margin", "k", "out", "format", "only",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    File { path: String, line: usize, message: String },
    #[error("cannot read config file {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("missing required setting `{0}`")]
    Missing(&'static str),
    #[error("window `{input}`: {message} at position {position}")]
    Window { input: String, position: usize, message: String },
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Raw string settings, before typing.
#[derive(Clone, Debug, Default)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file_text(text: &str, path: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let file_err = |message: String| ConfigError::File { path: path.to_string(), line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| file_err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(file_err(format!("unknown key `{key}`")));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Settings(map))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::parse_file_text(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: Option<&String>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v.clone());
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|s| s.parse::<T>().map_err(|e| ConfigError::Value { key: key.into(), message: format!("`{s}`: {e}") }))
            .transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Fully resolved settings for one run, echoed into every output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub model: String,
    pub h0: Option<f64>,
    pub h1: Option<f64>,
    pub beta: Option<f64>,
    pub beta_tilde: Option<f64>,
    pub window: Option<String>,
    pub samples: Option<usize>,
    pub horizon: Option<f64>,
    pub burn: Option<f64>,
    pub seed: u64,
    pub max_rect: usize,
    pub max_depth: f64,
    pub margin: u64,
    pub k: u64,
    pub only: Option<Vec<u32>>,
    /// Not echoed, so that the same run written to two places gives the same bytes.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(command: &'static str, s: &Settings, env_seed: Option<String>) -> Result<Self> {
        let model = s.get("model").unwrap_or("edge").to_string();
        if !matches!(model.as_str(), "edge" | "ferrari" | "twostar") {
            return Err(ConfigError::Value { key: "model".into(), message: format!("`{model}`: expected edge, ferrari or twostar") });
        }
        let ferrari = model == "ferrari";
        let h0 = s.parsed("h0")?.or(ferrari.then_some(0.3));
        let h1 = s.parsed("h1")?.or(ferrari.then_some(0.5));
        let seed = match s.parsed::<u64>("seed")? {
            Some(seed) => seed,
            None => match env_seed {
                Some(v) => v.trim().parse().map_err(|e| ConfigError::Value {
                    key: SEED_ENV.into(),
                    message: format!("`{v}`: {e}"),
                })?,
                None => DEFAULT_SEED,
            },
        };
        let format = match s.get("format").unwrap_or("json") {
            "json" => Format::Json,
            "text" => Format::Text,
            other => return Err(ConfigError::Value { key: "format".into(), message: format!("`{other}`: expected json or text") }),
        };
        let only = s
            .get("only")
            .map(|list| {
                list.split(',')
                    .map(|t| {
                        t.trim().parse::<u32>().map_err(|e| ConfigError::Value { key: "only".into(), message: format!("`{t}`: {e}") })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let config = RunConfig {
            command,
            model,
            h0,
            h1,
            beta: s.parsed("beta")?,
            beta_tilde: s.parsed("beta-tilde")?,
            window: s.get("window").map(str::to_string),
            samples: s.parsed("samples")?,
            horizon: s.parsed("horizon")?,
            burn: s.parsed("burn")?,
            seed,
            max_rect: s.parsed("max-rect")?.unwrap_or(1_000_000),
            max_depth: s.parsed("max-depth")?.unwrap_or(1e4),
            margin: s.parsed("margin")?.unwrap_or(0),
            k: s.parsed("k")?.unwrap_or(5),
            only,
            out: s.get("out").map(PathBuf::from),
            format,
        };
        if !ferrari && (s.get("h0").is_some() || s.get("h1").is_some()) {
            return Err(ConfigError::Value { key: "h0".into(), message: "h0 and h1 only apply to --model ferrari".into() });
        }
        Ok(config)
    }

    /// Builds the model; parameter checks are the model's own.
    pub fn energy_model(&self) -> sggraph::Result<EnergyModel> {
        Ok(match self.model.as_str() {
            "ferrari" => EnergyModel::ferrari(self.h0.unwrap_or(0.3), self.h1.unwrap_or(0.5))?,
            "twostar" => EnergyModel::TwoStar,
            _ => EnergyModel::EdgeOnly,
        })
    }

    pub fn beta(&self) -> Result<f64> {
        self.beta.ok_or(ConfigError::Missing("beta"))
    }

    pub fn window(&self) -> Result<Window> {
        let spec = self.window.as_deref().ok_or(ConfigError::Missing("window"))?;
        parse_window(spec)
    }

    pub fn window_or(&self, default: &str) -> Result<Window> {
        parse_window(self.window.as_deref().unwrap_or(default))
    }

    /// Compact JSON of the config; the same config always gives the same bytes.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// `x0:x1,y0:y1` for a box, or `x,y;x,y;...` for a vertex list.
pub fn parse_window(input: &str) -> Result<Window> {
    let err = |position: usize, message: &str| ConfigError::Window {
        input: input.to_string(),
        position,
        message: message.to_string(),
    };
    let semantic = |e: sggraph::Error| err(0, &e.to_string());
    if input.contains(':') {
        let mut p = Cursor::new(input);
        let x0 = p.int()?;
        p.expect(':')?;
        let x1 = p.int()?;
        p.expect(',')?;
        let y0 = p.int()?;
        p.expect(':')?;
        let y1 = p.int()?;
        p.end()?;
        if x0 > x1 || y0 > y1 {
            return Err(err(0, "box bounds must satisfy x0 <= x1 and y0 <= y1"));
        }
        return Window::rect(x0, x1, y0, y1).map_err(semantic);
    }
    let mut p = Cursor::new(input);
    let mut vertices = Vec::new();
    loop {
        let x = p.int()?;
        p.expect(',')?;
        let y = p.int()?;
        vertices.push(Vertex::new(x, y));
        if p.at_end() {
            break;
        }
        p.expect(';')?;
    }
    Window::from_vertices(vertices).map_err(semantic)
}

struct Cursor<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Self {
        Cursor { input, pos: 0 }
    }

    fn err(&self, message: String) -> ConfigError {
        ConfigError::Window { input: self.input.to_string(), position: self.pos, message }
    }

    fn skip_spaces(&mut self) {
        while self.input[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_spaces();
        self.pos == self.input.len()
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_spaces();
        let rest = &self.input[self.pos..];
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+')))
            .count();
        let text = &rest[..len];
        let value = text.parse::<i64>().map_err(|_| self.err("expected an integer".into()))?;
        self.pos += len;
        Ok(value)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_spaces();
        if self.input[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn end(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input".into()))
        }
    }
}
