//! A bundled in-process mock of the completion HTTP protocol.
//!
//! Serves `/chat/completions` and `/completions` from a plain
//! `TcpListener`, one thread per connection, and tracks request counts and
//! the maximum number of concurrently in-flight requests. Tests and offline
//! demos script it with a responder closure keyed on the received prompt
//! and the request ordinal.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::{json, Value};

/// What the mock saw in one request.
#[derive(Debug, Clone)]
pub struct ReceivedRequest {
    pub path: String,
    /// The prompt string (chat: first message content; completion: prompt).
    pub prompt: String,
    pub body: Value,
    /// Raw `Authorization` header value, when sent.
    pub authorization: Option<String>,
}

/// What the responder tells the mock to send back.
#[derive(Debug, Clone)]
pub enum MockReply {
    /// A well-formed completion/chat response carrying this text.
    Text(String),
    /// An arbitrary status code with a plain body.
    Status(u16, String),
    /// HTTP 200 whose JSON body is missing the text field.
    MissingText,
}

type Responder = dyn Fn(&ReceivedRequest, usize) -> MockReply + Send + Sync;

struct Shared {
    responder: Box<Responder>,
    delay: Duration,
    requests: AtomicUsize,
    active: AtomicUsize,
    max_active: AtomicUsize,
    shutdown: AtomicBool,
}

pub struct MockServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    accept_thread: Option<JoinHandle<()>>,
}

impl MockServer {
    /// Start a mock that always replies with the same text.
    pub fn fixed(text: impl Into<String>) -> std::io::Result<MockServer> {
        let text = text.into();
        MockServer::start(move |_, _| MockReply::Text(text.clone()))
    }

    pub fn start(
        responder: impl Fn(&ReceivedRequest, usize) -> MockReply + Send + Sync + 'static,
    ) -> std::io::Result<MockServer> {
        MockServer::start_with_delay(responder, Duration::ZERO)
    }

    /// `delay` is applied while a request is counted as in flight, which
    /// makes concurrency observable.
    pub fn start_with_delay(
        responder: impl Fn(&ReceivedRequest, usize) -> MockReply + Send + Sync + 'static,
        delay: Duration,
    ) -> std::io::Result<MockServer> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared {
            responder: Box::new(responder),
            delay,
            requests: AtomicUsize::new(0),
            active: AtomicUsize::new(0),
            max_active: AtomicUsize::new(0),
            shutdown: AtomicBool::new(false),
        });

        let accept_shared = Arc::clone(&shared);
        let accept_thread = std::thread::spawn(move || {
            let mut workers = Vec::new();
            for stream in listener.incoming() {
                if accept_shared.shutdown.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { break };
                let conn_shared = Arc::clone(&accept_shared);
                workers.push(std::thread::spawn(move || {
                    handle_connection(stream, &conn_shared);
                }));
            }
            for worker in workers {
                let _ = worker.join();
            }
        });

        Ok(MockServer {
            addr,
            shared,
            accept_thread: Some(accept_thread),
        })
    }

    /// Base URL to hand to an [`EndpointConfig`](super::EndpointConfig);
    /// the client appends `/chat/completions` or `/completions`.
    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    /// Total requests received so far.
    pub fn request_count(&self) -> usize {
        self.shared.requests.load(Ordering::SeqCst)
    }

    /// Highest number of requests that were in flight at once.
    pub fn max_concurrent(&self) -> usize {
        self.shared.max_active.load(Ordering::SeqCst)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.shared.shutdown.store(true, Ordering::SeqCst);
        // Poke the listener out of accept().
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.accept_thread.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(mut stream: TcpStream, shared: &Shared) {
    let _ = stream.set_read_timeout(Some(Duration::from_secs(5)));
    let Some((path, authorization, body_bytes)) = read_request(&mut stream) else {
        return;
    };
    if shared.shutdown.load(Ordering::SeqCst) {
        return;
    }

    let ordinal = shared.requests.fetch_add(1, Ordering::SeqCst);
    let now_active = shared.active.fetch_add(1, Ordering::SeqCst) + 1;
    shared.max_active.fetch_max(now_active, Ordering::SeqCst);

    let reply = match serde_json::from_slice::<Value>(&body_bytes) {
        Ok(body) => {
            let prompt = extract_prompt(&path, &body);
            let request = ReceivedRequest {
                path: path.clone(),
                prompt,
                body,
                authorization,
            };
            if !shared.delay.is_zero() {
                std::thread::sleep(shared.delay);
            }
            (shared.responder)(&request, ordinal)
        }
        Err(e) => MockReply::Status(400, format!("invalid JSON: {e}")),
    };

    let (status, body) = render_reply(&path, reply);
    let _ = write_response(&mut stream, status, &body);

    shared.active.fetch_sub(1, Ordering::SeqCst);
}

fn extract_prompt(path: &str, body: &Value) -> String {
    let text = if path.ends_with("/chat/completions") {
        body.pointer("/messages/0/content").and_then(Value::as_str)
    } else {
        body.pointer("/prompt").and_then(Value::as_str)
    };
    text.unwrap_or_default().to_string()
}

fn render_reply(path: &str, reply: MockReply) -> (u16, String) {
    match reply {
        MockReply::Text(text) => {
            let body = if path.ends_with("/chat/completions") {
                json!({
                    "id": "chatcmpl-mock",
                    "object": "chat.completion",
                    "choices": [{
                        "index": 0,
                        "message": {"role": "assistant", "content": text},
                        "finish_reason": "stop"
                    }]
                })
            } else {
                json!({
                    "id": "cmpl-mock",
                    "object": "text_completion",
                    "choices": [{"index": 0, "text": text, "finish_reason": "stop"}]
                })
            };
            (200, body.to_string())
        }
        MockReply::MissingText => {
            (200, json!({"id": "cmpl-mock", "choices": [{"index": 0}]}).to_string())
        }
        MockReply::Status(status, body) => (status, body),
    }
}

fn read_request(stream: &mut TcpStream) -> Option<(String, Option<String>, Vec<u8>)> {
    let mut raw = Vec::new();
    let mut chunk = [0u8; 4096];
    let header_end = loop {
        match stream.read(&mut chunk) {
            Ok(0) => return None,
            Ok(n) => raw.extend_from_slice(&chunk[..n]),
            Err(_) => return None,
        }
        if let Some(pos) = raw.windows(4).position(|w| w == b"\r\n\r\n") {
            break pos;
        }
        if raw.len() > 1 << 20 {
            return None;
        }
    };

    let header_text = String::from_utf8_lossy(&raw[..header_end]).into_owned();
    let mut lines = header_text.split("\r\n");
    let request_line = lines.next()?;
    let path = request_line.split_whitespace().nth(1)?.to_string();
    let mut content_length = 0usize;
    let mut authorization = None;
    for (name, value) in lines.filter_map(|line| line.split_once(':')) {
        let name = name.trim();
        if name.eq_ignore_ascii_case("content-length") {
            content_length = value.trim().parse().unwrap_or(0);
        } else if name.eq_ignore_ascii_case("authorization") {
            authorization = Some(value.trim().to_string());
        }
    }

    let body_start = header_end + 4;
    while raw.len() < body_start + content_length {
        match stream.read(&mut chunk) {
            Ok(0) => break,
            Ok(n) => raw.extend_from_slice(&chunk[..n]),
            Err(_) => return None,
        }
    }
    Some((path, authorization, raw[body_start..].to_vec()))
}

fn write_response(stream: &mut TcpStream, status: u16, body: &str) -> std::io::Result<()> {
    let reason = match status {
        200 => "OK",
        400 => "Bad Request",
        401 => "Unauthorized",
        403 => "Forbidden",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Mock",
    };
    let response = format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    stream.write_all(response.as_bytes())?;
    stream.flush()
}
