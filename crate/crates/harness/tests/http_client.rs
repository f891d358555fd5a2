use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use base64::Engine as _;
use gtr_core::graph::ErConfig;
use gtr_core::gtr::GtrId;
use gtr_core::reasoner::{Reasoner, ReasonerError, ReasonerRequest};
use gtr_core::tasks::{generate_question, TaskKind};
use gtrbench::http::{HttpReasoner, HttpSettings};
use serde_json::Value;

/// Serves one scripted response per connection, recording request bodies.
struct Script {
    url: String,
    bodies: Arc<Mutex<Vec<String>>>,
    handle: JoinHandle<()>,
}

fn response(status: &str, extra_headers: &str, body: &str) -> String {
    format!(
        "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n{extra_headers}\r\n{body}",
        body.len()
    )
}

fn ok(content: &str, usage: Option<u32>) -> String {
    let mut v = serde_json::json!({"choices": [{"message": {"role": "assistant", "content": content}}]});
    if let Some(n) = usage {
        v["usage"] = serde_json::json!({"completion_tokens": n});
    }
    response("200 OK", "", &v.to_string())
}

fn serve(script: Vec<String>) -> Script {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let bodies = Arc::new(Mutex::new(Vec::new()));
    let seen = bodies.clone();
    let handle = std::thread::spawn(move || {
        for reply in script {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            seen.lock().unwrap().push(String::from_utf8(body).unwrap());
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    Script { url, bodies, handle }
}

fn client(url: &str) -> HttpReasoner {
    let mut s = HttpSettings::new(url, "test-model");
    s.initial_backoff = Duration::from_millis(1);
    s.api_key = Some("secret".into());
    HttpReasoner::new(s).unwrap()
}

fn request(gtr: GtrId) -> ReasonerRequest {
    let q = generate_question(TaskKind::Cyc, &ErConfig::default(), 3).unwrap();
    ReasonerRequest::new(&q, gtr, true, 1)
}

#[test]
fn retries_transient_failures_then_reads_usage() {
    let s = serve(vec![
        response("429 Too Many Requests", "Retry-After: 0\r\n", "{}"),
        response("503 Service Unavailable", "", "busy"),
        ok("<answer>Yes</answer>", Some(7)),
    ]);
    let resp = client(&s.url).ask(&request(GtrId::Tset), 0).unwrap();
    s.handle.join().unwrap();
    assert_eq!(resp.raw_text, "<answer>Yes</answer>");
    assert_eq!(resp.completion_tokens, 7);
    assert_eq!(s.bodies.lock().unwrap().len(), 3);
}

#[test]
fn honors_retry_after() {
    let s = serve(vec![response("429 Too Many Requests", "Retry-After: 0.3\r\n", "{}"), ok("x", Some(1))]);
    let start = Instant::now();
    client(&s.url).ask(&request(GtrId::Tlist), 0).unwrap();
    s.handle.join().unwrap();
    assert!(start.elapsed() >= Duration::from_millis(300));
}

#[test]
fn missing_usage_falls_back_to_whitespace_tokens() {
    let s = serve(vec![ok("yes it is <answer>Yes</answer>", None)]);
    let resp = client(&s.url).ask(&request(GtrId::Tmat), 0).unwrap();
    s.handle.join().unwrap();
    assert_eq!(resp.completion_tokens, 4);
}

#[test]
fn gives_up_after_five_retries() {
    let s = serve((0..6).map(|_| response("500 Internal Server Error", "", "boom")).collect());
    let err = client(&s.url).ask(&request(GtrId::Tset), 0).unwrap_err();
    s.handle.join().unwrap();
    assert!(matches!(err, ReasonerError::Transport(_)), "{err:?}");
    assert_eq!(s.bodies.lock().unwrap().len(), 6);
}

#[test]
fn client_errors_are_not_retried() {
    let s = serve(vec![response("400 Bad Request", "", "{\"error\":\"bad\"}")]);
    assert!(client(&s.url).ask(&request(GtrId::Tset), 0).is_err());
    s.handle.join().unwrap();
    assert_eq!(s.bodies.lock().unwrap().len(), 1);
}

#[test]
fn malformed_success_is_reported() {
    let s = serve(vec![response("200 OK", "", "{\"choices\": []}")]);
    let err = client(&s.url).ask(&request(GtrId::Tset), 0).unwrap_err();
    s.handle.join().unwrap();
    assert!(matches!(err, ReasonerError::MalformedResponse(_)));
}

#[test]
fn visual_gtrs_send_a_png_data_url() {
    let s = serve(vec![ok("<answer>No</answer>", Some(3)), ok("<answer>No</answer>", Some(3))]);
    let c = client(&s.url);
    c.ask(&request(GtrId::Vneato), 0).unwrap();
    let text_req = request(GtrId::Tlist);
    c.ask(&text_req, 1).unwrap();
    s.handle.join().unwrap();
    let bodies = s.bodies.lock().unwrap();

    let visual: Value = serde_json::from_str(&bodies[0]).unwrap();
    assert_eq!(visual["model"], "test-model");
    assert_eq!(visual["temperature"], 0.7);
    let parts = visual["messages"][0]["content"].as_array().unwrap();
    assert_eq!(parts.len(), 2);
    let url = parts[1]["image_url"]["url"].as_str().unwrap();
    let png = base64::engine::general_purpose::STANDARD.decode(url.strip_prefix("data:image/png;base64,").unwrap()).unwrap();
    assert_eq!(&png[..8], b"\x89PNG\r\n\x1a\n");

    let text: Value = serde_json::from_str(&bodies[1]).unwrap();
    let parts = text["messages"][0]["content"].as_array().unwrap();
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0]["text"].as_str().unwrap(), text_req.prompt_text());
}
