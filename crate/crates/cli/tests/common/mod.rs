#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use classlang::commands::{load_world, Io, Levels};
use classlang::server::{self, AppState};
use classlang_core::wire::{decode_server, ServerMessage};
use classlang_core::LanguageLevel;
use futures::{SinkExt, StreamExt};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpListener, TcpStream};
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{connect_async, MaybeTlsStream, WebSocketStream};

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

/// Starts a server for `program` on an ephemeral port.
pub async fn start_server(program: &Path, tick_rate: f64, record: Option<PathBuf>) -> SocketAddr {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let levels = Levels { flag: None, fallback: LanguageLevel::DEFAULT };
    let (interp, initial) = load_world(program, levels, &mut Io { out: &mut out, err: &mut err })
        .unwrap_or_else(|_| panic!("{}", String::from_utf8_lossy(&err)));
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(server::serve(listener, AppState::new(interp, initial, tick_rate, record)));
    addr
}

pub async fn http_get(addr: SocketAddr, path: &str) -> String {
    let mut stream = TcpStream::connect(addr).await.unwrap();
    let request = format!("GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n");
    stream.write_all(request.as_bytes()).await.unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).await.unwrap();
    response
}

pub struct Client {
    ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
}

impl Client {
    pub async fn connect(addr: SocketAddr) -> Client {
        let (ws, _) = connect_async(format!("ws://{addr}/session")).await.unwrap();
        Client { ws }
    }

    pub async fn send(&mut self, text: &str) {
        self.ws.send(Message::text(text)).await.unwrap();
    }

    /// The next protocol message, or `None` once the socket closes.
    pub async fn recv(&mut self) -> Option<ServerMessage> {
        self.recv_raw().await.map(|t| decode_server(&t).unwrap())
    }

    /// The next text message exactly as sent.
    pub async fn recv_raw(&mut self) -> Option<String> {
        let next = tokio::time::timeout(Duration::from_secs(10), self.ws.next()).await.expect("server went quiet");
        match next? {
            Ok(Message::Text(t)) => Some(t.to_string()),
            _ => None,
        }
    }

    pub async fn close(mut self) {
        let _ = self.ws.close(None).await;
    }
}

/// Polls for a file the server writes after a session ends.
pub async fn wait_for_file(path: &Path) -> String {
    for _ in 0..200 {
        if let Ok(text) = std::fs::read_to_string(path) {
            return text;
        }
        tokio::time::sleep(Duration::from_millis(25)).await;
    }
    panic!("{} never appeared", path.display());
}
