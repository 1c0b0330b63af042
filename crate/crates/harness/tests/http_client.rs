use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use nyaya_harness::{ClientError, GenerationRequest, HttpClient, ModelClient};

/// One-shot server: answers a single request with `status` and `body`, reports the request it saw.
fn serve(status: u16, body: &'static str, delay: Duration) -> (String, mpsc::Receiver<(String, String)>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/generate", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut head = String::new();
        let mut len = 0usize;
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                break;
            }
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                len = v.trim().parse().unwrap();
            }
            head.push_str(&line);
        }
        let mut buf = vec![0; len];
        reader.read_exact(&mut buf).unwrap();
        thread::sleep(delay);
        let mut stream = stream;
        let _ = write!(
            stream,
            "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
        let _ = tx.send((head, String::from_utf8(buf).unwrap()));
    });
    (url, rx)
}

fn req() -> GenerationRequest {
    GenerationRequest { system: "sys".into(), user: "problem".into(), temperature: 0.5, max_new_tokens: None }
}

fn client(url: &str) -> HttpClient {
    HttpClient::new(url, Some("k3y".into()), Duration::from_secs(5))
}

#[test]
fn returns_text_and_sends_request() {
    let (url, rx) = serve(200, r###"{"text":"## Samshaya\n..."}"###, Duration::ZERO);
    assert_eq!(client(&url).generate("a", &req()).unwrap(), "## Samshaya\n...");
    let (head, body) = rx.recv().unwrap();
    assert!(head.starts_with("POST /generate"));
    assert!(head.to_ascii_lowercase().contains("authorization: bearer k3y"));
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v, serde_json::json!({"system":"sys","user":"problem","temperature":0.5}));
}

#[test]
fn error_object_is_endpoint_error() {
    let (url, _rx) = serve(200, r#"{"error":"overloaded"}"#, Duration::ZERO);
    assert_eq!(client(&url).generate("a", &req()), Err(ClientError::Endpoint("overloaded".into())));
}

#[test]
fn empty_body_is_endpoint_error() {
    let (url, _rx) = serve(200, "", Duration::ZERO);
    assert!(matches!(client(&url).generate("a", &req()), Err(ClientError::Endpoint(_))));
}

#[test]
fn server_error_status() {
    let (url, _rx) = serve(503, "busy", Duration::ZERO);
    assert!(matches!(client(&url).generate("a", &req()), Err(ClientError::Endpoint(m)) if m.contains("503")));
}

#[test]
fn unexpected_json_is_malformed() {
    let (url, _rx) = serve(200, r#"{"output":"x"}"#, Duration::ZERO);
    assert!(matches!(client(&url).generate("a", &req()), Err(ClientError::Malformed(_))));
    let (url, _rx) = serve(200, "not json", Duration::ZERO);
    assert!(matches!(client(&url).generate("a", &req()), Err(ClientError::Malformed(_))));
}

#[test]
fn slow_server_times_out() {
    let (url, _rx) = serve(200, r#"{"text":"late"}"#, Duration::from_millis(1500));
    let c = HttpClient::new(&url, None, Duration::from_millis(200));
    assert_eq!(c.generate("a", &req()), Err(ClientError::Timeout));
}

#[test]
fn refused_connection_is_transport() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let c = client(&format!("http://127.0.0.1:{port}/"));
    assert!(matches!(c.generate("a", &req()), Err(ClientError::Transport(_))));
}
