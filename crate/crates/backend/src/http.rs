//! Generic adapter for remote moderation APIs, driven by a declarative
//! request/response template. Secrets never live in the template: `${NAME}`
//! in the endpoint or a header value is replaced from the environment.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use base64::Engine as _;
use reqwest::blocking::{multipart, Client};
use reqwest::header::{HeaderMap, HeaderName, HeaderValue};
use reqwest::Method;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sonomorph_audio::{content_digest, wav_bytes, AudioBuffer};
use sonomorph_linguistic::Transcript;

use crate::{BackendError, Category, ModerationBackend, Result, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpTemplate {
    pub endpoint: String,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default)]
    pub headers: BTreeMap<String, String>,
    pub body: BodyTemplate,
    pub response: ResponseMapping,
    /// Admitted requests per second, retries included.
    pub rate_limit_per_s: f64,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
}

fn default_method() -> String {
    "POST".into()
}

fn default_timeout() -> f64 {
    30.0
}

/// Request body. String values may contain `{{audio_base64}}`,
/// `{{audio_digest}}`, `{{sample_rate}}` and `{{transcript}}`; a JSON string
/// consisting of exactly `{{sample_rate}}` becomes a number, and exactly
/// `{{transcript}}` becomes `null` when no transcript is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyTemplate {
    Json { template: Value },
    /// The audio goes as a 16-bit WAV file part named `file_field`.
    Multipart {
        file_field: String,
        #[serde(default)]
        fields: BTreeMap<String, String>,
    },
}

/// Where the verdict lives in the provider's JSON reply. Paths are
/// dot-separated object keys or array indices (`results.0.label`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseMapping {
    pub category_path: String,
    #[serde(default)]
    pub confidence_path: Option<String>,
    /// Provider label to category. When empty, labels must already be
    /// category names.
    #[serde(default)]
    pub categories: BTreeMap<String, Category>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles for each later one.
    pub backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            backoff_ms: 250,
        }
    }
}

impl RetryPolicy {
    pub fn delay_before(&self, attempt: u32) -> Duration {
        Duration::from_millis(self.backoff_ms.saturating_mul(1 << (attempt.saturating_sub(2)).min(20)))
    }
}

/// Spaces admissions at least `1 / rate` apart, measured from the moment
/// the previous caller was actually let through.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    last: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(per_second: f64) -> Result<Self> {
        if !(per_second.is_finite() && per_second > 0.0) {
            return Err(BackendError::Config(format!("rate limit {per_second}/s must be positive")));
        }
        Ok(Self {
            interval: Duration::from_secs_f64(1.0 / per_second),
            last: Mutex::new(None),
        })
    }

    pub fn interval(&self) -> Duration {
        self.interval
    }

    /// Blocks until the caller may send. Callers queue on the lock, so
    /// admissions are serialized.
    pub fn acquire(&self) {
        let mut last = self.last.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(prev) = *last {
            let ready = prev + self.interval;
            let now = Instant::now();
            if ready > now {
                thread::sleep(ready - now);
            }
        }
        *last = Some(Instant::now());
    }
}

/// Replaces `${NAME}` with `lookup(NAME)`; unknown names are an error.
pub fn expand_env(s: &str, lookup: impl Fn(&str) -> Option<String>) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find("${") {
        out.push_str(&rest[..i]);
        let after = &rest[i + 2..];
        let end = after
            .find('}')
            .ok_or_else(|| BackendError::Config(format!("unterminated `${{` in `{s}`")))?;
        let name = &after[..end];
        let value = lookup(name)
            .ok_or_else(|| BackendError::Config(format!("environment variable `{name}` is not set")))?;
        out.push_str(&value);
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

struct Placeholders {
    audio_base64: String,
    audio_digest: String,
    sample_rate: u32,
    transcript: Option<String>,
}

impl Placeholders {
    fn fill_str(&self, s: &str) -> String {
        s.replace("{{audio_base64}}", &self.audio_base64)
            .replace("{{audio_digest}}", &self.audio_digest)
            .replace("{{sample_rate}}", &self.sample_rate.to_string())
            .replace("{{transcript}}", self.transcript.as_deref().unwrap_or(""))
    }

    fn fill(&self, v: &Value) -> Value {
        match v {
            Value::String(s) if s == "{{sample_rate}}" => Value::from(self.sample_rate),
            Value::String(s) if s == "{{transcript}}" => {
                self.transcript.clone().map_or(Value::Null, Value::String)
            }
            Value::String(s) => Value::String(self.fill_str(s)),
            Value::Array(a) => Value::Array(a.iter().map(|x| self.fill(x)).collect()),
            Value::Object(o) => Value::Object(o.iter().map(|(k, x)| (k.clone(), self.fill(x))).collect()),
            other => other.clone(),
        }
    }
}

fn lookup_path<'a>(v: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').filter(|p| !p.is_empty()).try_fold(v, |cur, key| match cur {
        Value::Object(o) => o.get(key),
        Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

impl ResponseMapping {
    /// Maps a provider reply to a verdict, keeping the reply as `raw`.
    pub fn map(&self, reply: Value) -> Result<Verdict> {
        let label = lookup_path(&reply, &self.category_path)
            .ok_or_else(|| BackendError::Mapping(format!("no value at `{}`", self.category_path)))?;
        let label = match label {
            Value::String(s) => s.clone(),
            Value::Null | Value::Object(_) | Value::Array(_) => {
                return Err(BackendError::Mapping(format!("`{}` is not a scalar label", self.category_path)))
            }
            other => other.to_string(),
        };
        let category = if self.categories.is_empty() {
            label.parse()?
        } else {
            *self
                .categories
                .get(&label)
                .ok_or_else(|| BackendError::Mapping(format!("provider label `{label}` has no category mapping")))?
        };
        let confidence = match &self.confidence_path {
            None => None,
            Some(p) => Some(
                lookup_path(&reply, p)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| BackendError::Mapping(format!("no numeric confidence at `{p}`")))?,
            ),
        };
        let mut v = Verdict::new(category, confidence)?;
        v.raw = Some(reply);
        Ok(v)
    }
}

pub struct HttpBackend {
    name: String,
    template: HttpTemplate,
    endpoint: String,
    method: Method,
    headers: HeaderMap,
    client: Client,
    limiter: RateLimiter,
}

impl HttpBackend {
    /// Validates the template and resolves secrets from the process
    /// environment.
    pub fn new(name: impl Into<String>, template: HttpTemplate) -> Result<Self> {
        Self::with_env(name, template, |k| std::env::var(k).ok())
    }

    pub fn with_env(
        name: impl Into<String>,
        template: HttpTemplate,
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<Self> {
        if template.retry.max_attempts < 1 {
            return Err(BackendError::Config("retry.max_attempts must be at least 1".into()));
        }
        if !(template.timeout_s.is_finite() && template.timeout_s > 0.0) {
            return Err(BackendError::Config(format!("timeout {} s must be positive", template.timeout_s)));
        }
        let limiter = RateLimiter::new(template.rate_limit_per_s)?;
        let endpoint = expand_env(&template.endpoint, &env)?;
        let method = Method::from_bytes(template.method.to_ascii_uppercase().as_bytes())
            .map_err(|_| BackendError::Config(format!("bad HTTP method `{}`", template.method)))?;
        let mut headers = HeaderMap::new();
        for (k, v) in &template.headers {
            let name = HeaderName::from_bytes(k.as_bytes())
                .map_err(|_| BackendError::Config(format!("bad header name `{k}`")))?;
            let value = HeaderValue::from_str(&expand_env(v, &env)?)
                .map_err(|_| BackendError::Config(format!("bad value for header `{k}`")))?;
            headers.insert(name, value);
        }
        let client = Client::builder()
            .timeout(Duration::from_secs_f64(template.timeout_s))
            .build()
            .map_err(|e| BackendError::Config(format!("http client: {e}")))?;
        Ok(Self {
            name: name.into(),
            template,
            endpoint,
            method,
            headers,
            client,
            limiter,
        })
    }

    pub fn template(&self) -> &HttpTemplate {
        &self.template
    }

    fn send_once(&self, wav: &[u8], fill: &Placeholders) -> std::result::Result<Value, Attempt> {
        let req = self
            .client
            .request(self.method.clone(), &self.endpoint)
            .headers(self.headers.clone());
        let req = match &self.template.body {
            BodyTemplate::Json { template } => req.json(&fill.fill(template)),
            BodyTemplate::Multipart { file_field, fields } => {
                let part = multipart::Part::bytes(wav.to_vec())
                    .file_name("audio.wav")
                    .mime_str("audio/wav")
                    .expect("static mime type parses");
                let form = fields
                    .iter()
                    .fold(multipart::Form::new().part(file_field.clone(), part), |f, (k, v)| {
                        f.text(k.clone(), fill.fill_str(v))
                    });
                req.multipart(form)
            }
        };
        self.limiter.acquire();
        let resp = req.send().map_err(|e| Attempt::Retry(format!("transport: {e}")))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| Attempt::Retry(format!("reading body: {e}")))?;
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(Attempt::Retry(format!("status {status}")));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(BackendError::Unavailable(format!("status {status}: {text}"))));
        }
        serde_json::from_str(&text)
            .map_err(|e| Attempt::Fatal(BackendError::Mapping(format!("reply is not JSON: {e}"))))
    }
}

enum Attempt {
    Retry(String),
    Fatal(BackendError),
}

impl ModerationBackend for HttpBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn moderate(&self, audio: &AudioBuffer, transcript_hint: Option<&Transcript>) -> Result<Verdict> {
        let wav = wav_bytes(audio)?;
        let fill = Placeholders {
            audio_base64: base64::engine::general_purpose::STANDARD.encode(&wav),
            audio_digest: content_digest(audio),
            sample_rate: audio.sample_rate(),
            transcript: transcript_hint.map(Transcript::render),
        };
        let policy = self.template.retry;
        let mut last = String::new();
        for attempt in 1..=policy.max_attempts {
            if attempt > 1 {
                thread::sleep(policy.delay_before(attempt));
            }
            match self.send_once(&wav, &fill) {
                Ok(reply) => return self.template.response.map(reply),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) => last = msg,
            }
        }
        Err(BackendError::Unavailable(format!(
            "{} after {} attempts: {last}",
            self.name, policy.max_attempts
        )))
    }
}
