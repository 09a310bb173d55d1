//! Chat-completion gateway: prompt rendering, strict answer parsing, an
//! append-only label cache, and a bounded-concurrency batch client.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::corpus::{HeadlineRecord, Label, LabelRecord};
use crate::error::{Error, Result};

pub const PLACEHOLDER: &str = "{headline}";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub prompt_id: String,
    pub template: String,
    pub answer_map: BTreeMap<String, Label>,
}

impl PromptTemplate {
    pub fn new(
        prompt_id: impl Into<String>,
        template: impl Into<String>,
        answer_map: BTreeMap<String, Label>,
    ) -> Result<Self> {
        let t = Self {
            prompt_id: prompt_id.into(),
            template: template.into(),
            answer_map,
        };
        let mut problems = Vec::new();
        let n = t.template.matches(PLACEHOLDER).count();
        if n != 1 {
            problems.push(format!("template must contain `{PLACEHOLDER}` exactly once (found {n})"));
        }
        let distinct: HashSet<Label> = t.answer_map.values().copied().collect();
        if distinct.len() < 2 {
            problems.push("answer map must cover at least two labels".into());
        }
        if let Some(k) = t.answer_map.keys().find(|k| k.trim().to_uppercase() != **k) {
            problems.push(format!("answer token `{k}` must be trimmed uppercase"));
        }
        if problems.is_empty() {
            Ok(t)
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn render(&self, headline: &str) -> String {
        self.template.replacen(PLACEHOLDER, headline, 1)
    }

    /// Uppercases and trims the reply, then requires an exact key match.
    pub fn parse_response(&self, raw: &str) -> Label {
        self.answer_map
            .get(raw.trim().to_uppercase().as_str())
            .copied()
            .unwrap_or(Label::Unknown)
    }

    /// The zero-shot direction prompt and its three wording variants.
    pub fn builtin(prompt_id: &str) -> Option<Self> {
        let (question, up, down) = match prompt_id {
            "baseline" => (
                "whether this headline suggests the U.S. stock prices are GOING UP or GOING DOWN",
                "GOING UP",
                "GOING DOWN",
            ),
            "optimism" => (
                "whether this headline is PESSIMISTIC or OPTIMISTIC for the U.S. stock market",
                "OPTIMISTIC",
                "PESSIMISTIC",
            ),
            "positivity" => (
                "whether this headline is NEGATIVE or POSITIVE for the U.S. stock market",
                "POSITIVE",
                "NEGATIVE",
            ),
            "goodbad" => (
                "whether this headline is GOOD or BAD for the U.S. stock market",
                "GOOD",
                "BAD",
            ),
            _ => return None,
        };
        let options = if prompt_id == "baseline" {
            format!("{up}, {down}, UNKNOWN")
        } else {
            format!("{down}, {up}, UNKNOWN")
        };
        let template = format!(
            "Forget all previous instructions. You are now a financial expert giving investment advice. \
             I'll give you a news headline, and you need to answer {question}. \
             Please choose only one option from {options}, and do not provide any additional responses.\n\n\
             Headline: {PLACEHOLDER}"
        );
        let answer_map = BTreeMap::from([
            (up.to_string(), Label::Up),
            (down.to_string(), Label::Down),
            ("UNKNOWN".to_string(), Label::Unknown),
        ]);
        Some(Self::new(prompt_id, template, answer_map).expect("builtin prompt is valid"))
    }

    pub fn builtin_ids() -> [&'static str; 4] {
        ["baseline", "optimism", "positivity", "goodbad"]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    pub api_key_env_var: String,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    #[serde(default = "default_retries")]
    pub retries: u32,
    /// First backoff delay; doubles on every retry.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
}

fn default_in_flight() -> usize {
    4
}
fn default_retries() -> u32 {
    3
}
fn default_backoff_ms() -> u64 {
    500
}

impl EndpointConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            problems.push(format!("base_url `{}` must be http(s)", self.base_url));
        }
        if self.model_name.is_empty() {
            problems.push("model_name is empty".into());
        }
        if self.max_in_flight == 0 {
            problems.push("max_in_flight must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
}

impl ChatRequest {
    pub fn single_user(model: &str, content: String) -> Self {
        Self {
            model: model.into(),
            messages: vec![ChatMessage {
                role: "user".into(),
                content,
            }],
            temperature: 0.0,
        }
    }
}

/// Anything that can answer one chat request with the assistant's text.
pub trait ChatTransport: Sync {
    fn complete(&self, request: &ChatRequest) -> std::result::Result<String, String>;
}

/// JSON-over-HTTP transport posting to `{base_url}/chat/completions`.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    url: String,
    api_key: Option<String>,
}

impl HttpTransport {
    pub fn new(cfg: &EndpointConfig) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| Error::Config(vec![format!("http client: {e}")]))?;
        Ok(Self {
            client,
            url: format!("{}/chat/completions", cfg.base_url.trim_end_matches('/')),
            api_key: std::env::var(&cfg.api_key_env_var).ok(),
        })
    }
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    message: ChatMessage,
}

impl ChatTransport for HttpTransport {
    fn complete(&self, request: &ChatRequest) -> std::result::Result<String, String> {
        let mut req = self.client.post(&self.url).json(request);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| e.to_string())?;
        let status = resp.status();
        if !status.is_success() {
            return Err(format!("HTTP {status}"));
        }
        let body: CompletionResponse = resp.json().map_err(|e| e.to_string())?;
        body.choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| "response has no choices".to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    pub source: String,
    pub prompt_id: String,
    pub headline_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub source: String,
    pub prompt_id: String,
    pub headline_id: String,
    pub label: Label,
    pub raw_response: String,
    pub timestamp: String,
}

impl CacheEntry {
    fn key(&self) -> CacheKey {
        CacheKey {
            source: self.source.clone(),
            prompt_id: self.prompt_id.clone(),
            headline_id: self.headline_id.clone(),
        }
    }
}

/// Append-only label cache, optionally persisted as JSON lines.
///
/// The first entry for a key wins; later inserts for the same key are
/// ignored both in memory and on disk.
pub struct LabelCache {
    entries: Mutex<HashMap<CacheKey, CacheEntry>>,
    file: Option<(PathBuf, Mutex<File>)>,
}

impl LabelCache {
    pub fn in_memory() -> Self {
        Self {
            entries: Mutex::new(HashMap::new()),
            file: None,
        }
    }

    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        if path.exists() {
            let f = File::open(path).map_err(|e| Error::io(path, e))?;
            for (i, line) in BufReader::new(f).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: CacheEntry = serde_json::from_str(&line)
                    .map_err(|e| Error::Parse(format!("{} line {}: {e}", path.display(), i + 1)))?;
                entries.entry(entry.key()).or_insert(entry);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(Self {
            entries: Mutex::new(entries),
            file: Some((path.to_path_buf(), Mutex::new(file))),
        })
    }

    pub fn get(&self, key: &CacheKey) -> Option<CacheEntry> {
        self.entries.lock().unwrap().get(key).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns false when the key was already present.
    pub fn insert(&self, entry: CacheEntry) -> Result<bool> {
        let mut entries = self.entries.lock().unwrap();
        let key = entry.key();
        if entries.contains_key(&key) {
            return Ok(false);
        }
        if let Some((path, file)) = &self.file {
            let mut line = serde_json::to_string(&entry)?;
            line.push('\n');
            let mut f = file.lock().unwrap();
            f.write_all(line.as_bytes())
                .and_then(|_| f.flush())
                .map_err(|e| Error::io(path, e))?;
        }
        entries.insert(key, entry);
        Ok(true)
    }
}

#[derive(Debug, Clone)]
pub struct GatewayOptions {
    pub source: String,
    pub model: String,
    pub max_in_flight: usize,
    pub retries: u32,
    pub backoff: Duration,
}

impl GatewayOptions {
    pub fn from_endpoint(cfg: &EndpointConfig) -> Self {
        Self {
            source: cfg.model_name.clone(),
            model: cfg.model_name.clone(),
            max_in_flight: cfg.max_in_flight.max(1),
            retries: cfg.retries,
            backoff: Duration::from_millis(cfg.backoff_ms),
        }
    }
}

/// Labels every headline through the transport, consulting the cache first.
///
/// Each uncached headline id is requested exactly once; output order follows
/// the input regardless of completion order. A headline that still fails
/// after all retries aborts the batch with a transport error naming it, after
/// successful replies have been cached.
pub fn llm_classify(
    headlines: &[HeadlineRecord],
    template: &PromptTemplate,
    transport: &dyn ChatTransport,
    cache: &LabelCache,
    opts: &GatewayOptions,
) -> Result<Vec<LabelRecord>> {
    let key_for = |id: &str| CacheKey {
        source: opts.source.clone(),
        prompt_id: template.prompt_id.clone(),
        headline_id: id.to_string(),
    };

    let mut seen = HashSet::new();
    let pending: Vec<&HeadlineRecord> = headlines
        .iter()
        .filter(|h| seen.insert(h.id.as_str()) && cache.get(&key_for(&h.id)).is_none())
        .collect();

    let next = AtomicUsize::new(0);
    let failures: Mutex<Vec<(usize, String)>> = Mutex::new(Vec::new());
    let cache_errors: Mutex<Vec<Error>> = Mutex::new(Vec::new());
    let workers = opts.max_in_flight.max(1).min(pending.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(h) = pending.get(i) else { break };
                let request = ChatRequest::single_user(&opts.model, template.render(&h.text));
                match request_with_retries(transport, &request, opts) {
                    Ok(raw) => {
                        let entry = CacheEntry {
                            source: opts.source.clone(),
                            prompt_id: template.prompt_id.clone(),
                            headline_id: h.id.clone(),
                            label: template.parse_response(&raw),
                            raw_response: raw,
                            timestamp: chrono::Utc::now().to_rfc3339(),
                        };
                        if let Err(e) = cache.insert(entry) {
                            cache_errors.lock().unwrap().push(e);
                        }
                    }
                    Err(msg) => failures.lock().unwrap().push((i, msg)),
                }
            });
        }
    });

    if let Some(e) = cache_errors.into_inner().unwrap().into_iter().next() {
        return Err(e);
    }
    let mut failures = failures.into_inner().unwrap();
    failures.sort_by_key(|(i, _)| *i);
    if let Some((i, message)) = failures.into_iter().next() {
        return Err(Error::Transport {
            headline_id: pending[i].id.clone(),
            message,
        });
    }

    headlines
        .iter()
        .map(|h| {
            let entry = cache
                .get(&key_for(&h.id))
                .expect("every headline is cached after a successful batch");
            Ok(LabelRecord {
                headline_id: h.id.clone(),
                label: entry.label,
                source: opts.source.clone(),
                prompt_id: template.prompt_id.clone(),
            })
        })
        .collect()
}

fn request_with_retries(
    transport: &dyn ChatTransport,
    request: &ChatRequest,
    opts: &GatewayOptions,
) -> std::result::Result<String, String> {
    let mut delay = opts.backoff;
    let mut attempt = 0;
    loop {
        match transport.complete(request) {
            Ok(raw) => return Ok(raw),
            Err(e) if attempt >= opts.retries => {
                return Err(format!("{e} (after {} attempts)", attempt + 1))
            }
            Err(_) => {
                std::thread::sleep(delay);
                delay *= 2;
                attempt += 1;
            }
        }
    }
}
