//! Client for OpenAI-compatible chat-completion endpoints.
//!
//! One user turn per request: a text part (instruction, preceded by the
//! textual GTR body) and, for visual GTRs, a PNG image part sent as a base64
//! data URL. Transient failures are retried with exponential backoff; a
//! shared token bucket spaces requests and a counting semaphore bounds the
//! number in flight.

use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use base64::Engine as _;
use gtr_core::gtr::raster::render_png;
use gtr_core::gtr::GtrPayload;
use gtr_core::reasoner::{whitespace_tokens, Reasoner, ReasonerError, ReasonerRequest, ReasonerResponse};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::HarnessError;

pub const DEFAULT_API_BASE: &str = "https://api.openai.com";
const MAX_BACKOFF: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq)]
pub struct HttpSettings {
    pub url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub timeout: Duration,
    pub requests_per_second: f64,
    pub max_in_flight: usize,
    pub raster_px: u32,
}

impl HttpSettings {
    /// Settings for `base` (a server root, a `/v1` root or a full
    /// `/chat/completions` URL).
    pub fn new(base: &str, model: &str) -> Self {
        HttpSettings {
            url: chat_completions_url(base),
            api_key: None,
            model: model.to_string(),
            max_retries: 5,
            initial_backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(120),
            requests_per_second: 0.0,
            max_in_flight: 4,
            raster_px: gtr_core::gtr::raster::DEFAULT_RASTER_PX,
        }
    }

    /// Reads `GTR_API_BASE` and `GTR_API_KEY`; the configured base URL takes
    /// precedence over the environment.
    pub fn from_config(cfg: &RunConfig) -> Result<Self, HarnessError> {
        let ep = &cfg.endpoint;
        let base = match &ep.base_url {
            Some(b) => b.clone(),
            None => std::env::var("GTR_API_BASE").unwrap_or_else(|_| DEFAULT_API_BASE.to_string()),
        };
        let api_key = std::env::var("GTR_API_KEY").ok().filter(|k| !k.is_empty());
        if api_key.is_none() && base.starts_with(DEFAULT_API_BASE) {
            return Err(HarnessError::Config("GTR_API_KEY is not set".into()));
        }
        Ok(HttpSettings {
            api_key,
            max_retries: ep.max_retries,
            initial_backoff: Duration::from_millis(ep.initial_backoff_ms),
            timeout: Duration::from_secs(ep.timeout_secs),
            requests_per_second: ep.requests_per_second,
            max_in_flight: cfg.concurrency,
            raster_px: ep.raster_px,
            ..HttpSettings::new(&base, &ep.model)
        })
    }
}

pub fn chat_completions_url(base: &str) -> String {
    let base = base.trim_end_matches('/');
    if base.ends_with("/chat/completions") {
        base.to_string()
    } else if base.ends_with("/v1") {
        format!("{base}/chat/completions")
    } else {
        format!("{base}/v1/chat/completions")
    }
}

/// Request spacing: `rate` tokens per second, bursts up to `max(1, rate)`.
#[derive(Debug)]
struct TokenBucket {
    rate: f64,
    capacity: f64,
    state: Mutex<(f64, Instant)>,
}

impl TokenBucket {
    fn new(rate: f64) -> Self {
        let capacity = rate.max(1.0);
        TokenBucket { rate, capacity, state: Mutex::new((capacity, Instant::now())) }
    }

    fn acquire(&self) {
        if self.rate <= 0.0 {
            return;
        }
        loop {
            let wait = {
                let mut s = self.state.lock().expect("bucket lock");
                let now = Instant::now();
                s.0 = (s.0 + now.duration_since(s.1).as_secs_f64() * self.rate).min(self.capacity);
                s.1 = now;
                if s.0 >= 1.0 {
                    s.0 -= 1.0;
                    return;
                }
                (1.0 - s.0) / self.rate
            };
            std::thread::sleep(Duration::from_secs_f64(wait));
        }
    }
}

#[derive(Debug)]
struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

struct SlotGuard<'a>(&'a Slots);

impl Slots {
    fn new(n: usize) -> Self {
        Slots { free: Mutex::new(n.max(1)), cv: Condvar::new() }
    }

    fn take(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().expect("slot lock");
        while *free == 0 {
            free = self.cv.wait(free).expect("slot lock");
        }
        *free -= 1;
        SlotGuard(self)
    }
}

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("slot lock") += 1;
        self.0.cv.notify_one();
    }
}

pub struct HttpReasoner {
    client: reqwest::blocking::Client,
    settings: HttpSettings,
    bucket: TokenBucket,
    slots: Slots,
}

impl HttpReasoner {
    pub fn new(settings: HttpSettings) -> Result<Self, HarnessError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(settings.timeout)
            .build()
            .map_err(|e| HarnessError::Config(format!("building HTTP client: {e}")))?;
        Ok(HttpReasoner {
            client,
            bucket: TokenBucket::new(settings.requests_per_second),
            slots: Slots::new(settings.max_in_flight),
            settings,
        })
    }

    pub fn settings(&self) -> &HttpSettings {
        &self.settings
    }

    /// The JSON body for `req`.
    pub fn request_body(&self, req: &ReasonerRequest) -> Result<Value, ReasonerError> {
        let mut content = vec![json!({"type": "text", "text": req.prompt_text()})];
        match &req.payload {
            Some(GtrPayload::Visual(v)) => {
                let png = render_png(&v.scene, self.settings.raster_px);
                let data = base64::engine::general_purpose::STANDARD.encode(png);
                content.push(json!({"type": "image_url", "image_url": {"url": format!("data:image/png;base64,{data}")}}));
            }
            Some(GtrPayload::Text(_)) => {}
            None => return Err(ReasonerError::Config(format!("request for {} carries no rendered GTR", req.gtr))),
        }
        Ok(json!({
            "model": self.settings.model,
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
            "messages": [{"role": "user", "content": content}],
        }))
    }

    fn backoff(&self, attempt: u32) -> Duration {
        self.settings.initial_backoff.saturating_mul(1u32 << attempt.min(16)).min(MAX_BACKOFF)
    }

    /// One POST. `Ok` carries the parsed reply; `Err((error, retryable))`.
    fn send_once(&self, body: &Value) -> Result<(String, Option<u32>), (ReasonerError, bool)> {
        let mut rb = self.client.post(&self.settings.url).json(body);
        if let Some(key) = &self.settings.api_key {
            rb = rb.bearer_auth(key);
        }
        let resp = rb.send().map_err(|e| (ReasonerError::Transport(e.to_string()), true))?;
        let status = resp.status();
        if status.as_u16() == 429 {
            let retry_after_ms = resp
                .headers()
                .get(reqwest::header::RETRY_AFTER)
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse::<f64>().ok())
                .filter(|s| s.is_finite() && *s >= 0.0)
                .map(|s| (s * 1000.0) as u64);
            return Err((ReasonerError::RateLimited { retry_after_ms }, true));
        }
        let text = resp.text().map_err(|e| (ReasonerError::Transport(e.to_string()), true))?;
        if status.is_server_error() {
            return Err((ReasonerError::Transport(format!("HTTP {status}: {}", snippet(&text))), true));
        }
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err((ReasonerError::Config(format!("HTTP {status}: check GTR_API_KEY")), false));
        }
        if !status.is_success() {
            return Err((ReasonerError::Transport(format!("HTTP {status}: {}", snippet(&text))), false));
        }
        parse_completion(&text).map_err(|e| (e, false))
    }
}

fn snippet(text: &str) -> &str {
    let end = text.char_indices().nth(200).map_or(text.len(), |(i, _)| i);
    &text[..end]
}

/// Extracts the reply text and the reported completion tokens, if any.
pub fn parse_completion(body: &str) -> Result<(String, Option<u32>), ReasonerError> {
    let v: Value = serde_json::from_str(body).map_err(|e| ReasonerError::MalformedResponse(e.to_string()))?;
    let content = v
        .pointer("/choices/0/message/content")
        .ok_or_else(|| ReasonerError::MalformedResponse("no choices[0].message.content".into()))?;
    let text = match content {
        Value::String(s) => s.clone(),
        Value::Array(parts) => parts
            .iter()
            .filter_map(|p| p.get("text").and_then(Value::as_str))
            .collect::<Vec<_>>()
            .join(""),
        other => return Err(ReasonerError::MalformedResponse(format!("unexpected content {other}"))),
    };
    let tokens = v
        .pointer("/usage/completion_tokens")
        .and_then(Value::as_u64)
        .map(|t| t.min(u32::MAX as u64) as u32);
    Ok((text, tokens))
}

impl Reasoner for HttpReasoner {
    fn ask(&self, req: &ReasonerRequest, trial: usize) -> Result<ReasonerResponse, ReasonerError> {
        let body = self.request_body(req)?;
        let _slot = self.slots.take();
        let mut attempt = 0;
        loop {
            self.bucket.acquire();
            let start = Instant::now();
            match self.send_once(&body) {
                Ok((raw_text, usage)) => {
                    let completion_tokens = usage.filter(|&t| t > 0).unwrap_or_else(|| whitespace_tokens(&raw_text));
                    return Ok(ReasonerResponse {
                        raw_text,
                        completion_tokens,
                        latency_ms: start.elapsed().as_millis() as u64,
                    });
                }
                Err((e, true)) if attempt < self.settings.max_retries => {
                    let wait = match &e {
                        ReasonerError::RateLimited { retry_after_ms: Some(ms) } => Duration::from_millis(*ms),
                        _ => self.backoff(attempt),
                    };
                    log::debug!("{} trial {trial}: {e}; retrying in {wait:?}", req.question.id);
                    std::thread::sleep(wait);
                    attempt += 1;
                }
                Err((e, _)) => return Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn url_forms() {
        assert_eq!(chat_completions_url("http://h:1"), "http://h:1/v1/chat/completions");
        assert_eq!(chat_completions_url("http://h:1/v1/"), "http://h:1/v1/chat/completions");
        assert_eq!(chat_completions_url("http://h/x/chat/completions"), "http://h/x/chat/completions");
    }

    #[test]
    fn parses_string_and_part_content() {
        let (t, n) =
            parse_completion(r#"{"choices":[{"message":{"content":"a <answer>Yes</answer>"}}],"usage":{"completion_tokens":7}}"#)
                .unwrap();
        assert_eq!((t.as_str(), n), ("a <answer>Yes</answer>", Some(7)));
        let (t, n) =
            parse_completion(r#"{"choices":[{"message":{"content":[{"type":"text","text":"x"},{"type":"text","text":"y"}]}}]}"#)
                .unwrap();
        assert_eq!((t.as_str(), n), ("xy", None));
        assert!(matches!(parse_completion("{}"), Err(ReasonerError::MalformedResponse(_))));
        assert!(matches!(parse_completion("not json"), Err(ReasonerError::MalformedResponse(_))));
    }

    #[test]
    fn backoff_doubles_and_caps() {
        let r = HttpReasoner::new(HttpSettings::new("http://127.0.0.1:9", "m")).unwrap();
        assert_eq!(r.backoff(0), Duration::from_millis(500));
        assert_eq!(r.backoff(2), Duration::from_millis(2000));
        assert_eq!(r.backoff(10), MAX_BACKOFF);
    }

    #[test]
    fn bucket_spaces_requests() {
        let b = TokenBucket::new(50.0);
        let start = Instant::now();
        for _ in 0..60 {
            b.acquire();
        }
        // 50 tokens are available at once; the other 10 take 0.2 s.
        assert!(start.elapsed() >= Duration::from_millis(150));
    }
}
