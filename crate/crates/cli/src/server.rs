//! Live world sessions over WebSocket.
//!
//! Each connection gets its own [`Session`]. A ticker task and the socket
//! reader feed one queue; a single worker drains it, so events are applied
//! strictly in arrival order. Outgoing frames go through a bounded queue and
//! are dropped when a client falls behind; events never are.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{Html, IntoResponse};
use axum::routing::get;
use axum::Router;
use classlang_core::wire::{encode, Input, ServerMessage, Session, MAX_FRAME_LAG};
use classlang_core::{Interp, Value};
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio::sync::mpsc;
use tokio::time::{interval, MissedTickBehavior};

const INDEX_HTML: &str = include_str!("index.html");

/// What every session starts from.
#[derive(Clone)]
pub struct AppState {
    interp: Arc<Interp>,
    initial: Value,
    tick: Duration,
    record: Option<PathBuf>,
    sessions: Arc<AtomicU64>,
}

impl AppState {
    pub fn new(interp: Interp, initial: Value, tick_rate: f64, record: Option<PathBuf>) -> Self {
        AppState {
            interp: Arc::new(interp),
            initial,
            tick: Duration::from_secs_f64(1.0 / tick_rate),
            record,
            sessions: Arc::new(AtomicU64::new(0)),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/", get(|| async { Html(INDEX_HTML) }))
        .route("/healthz", get(|| async { "ok" }))
        .route("/session", get(upgrade))
        .with_state(state)
}

pub async fn serve(listener: TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| run_session(socket, state))
}

async fn run_session(socket: WebSocket, state: AppState) {
    let id = state.sessions.fetch_add(1, Ordering::Relaxed);
    tracing::info!(session = id, "session opened");
    let (mut sink, mut stream) = socket.split();
    let (input_tx, mut inputs) = mpsc::unbounded_channel::<Input>();
    let (out_tx, mut outgoing) = mpsc::channel::<ServerMessage>(MAX_FRAME_LAG);

    let writer = tokio::spawn(async move {
        while let Some(msg) = outgoing.recv().await {
            let halt = matches!(msg, ServerMessage::Halt { .. });
            if sink.send(Message::Text(encode(&msg).into())).await.is_err() {
                break;
            }
            if halt {
                let _ = sink.close().await;
                break;
            }
        }
    });

    let reader_tx = input_tx.clone();
    let reader = tokio::spawn(async move {
        while let Some(msg) = stream.next().await {
            let input = match msg {
                Ok(Message::Text(text)) => Input::Client(text.to_string()),
                Ok(Message::Binary(_)) => Input::Client(String::new()),
                Ok(Message::Close(_)) | Err(_) => break,
                Ok(_) => continue,
            };
            if reader_tx.send(input).is_err() {
                return;
            }
        }
        let _ = reader_tx.send(Input::Disconnected);
    });

    let tick = state.tick;
    let ticker = tokio::spawn(async move {
        let mut clock = interval(tick);
        clock.set_missed_tick_behavior(MissedTickBehavior::Delay);
        clock.tick().await;
        loop {
            clock.tick().await;
            if input_tx.send(Input::Tick).is_err() {
                break;
            }
        }
    });

    let (mut session, opening) = Session::start(state.interp.clone(), state.initial.clone());
    let mut dropped = 0u64;
    deliver(&out_tx, opening, &mut dropped).await;
    while !session.is_halted() {
        let Some(input) = inputs.recv().await else { break };
        deliver(&out_tx, session.handle(input), &mut dropped).await;
    }
    ticker.abort();
    reader.abort();
    drop(out_tx);
    let _ = writer.await;

    if let Some(dir) = &state.record {
        let path = dir.join(format!("session-{id}.jsonl"));
        let written = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, session.event_log().to_jsonl()));
        if let Err(e) = written {
            tracing::warn!(session = id, "cannot record to {}: {e}", path.display());
        }
    }
    tracing::info!(
        session = id,
        reason = session.halt_reason().unwrap_or("closed"),
        frames_dropped = dropped,
        world = %session.world(),
        "session closed"
    );
}

/// Queues messages for the writer. Frames are dropped when the queue is
/// full; everything else waits for room.
async fn deliver(out: &mpsc::Sender<ServerMessage>, msgs: Vec<ServerMessage>, dropped: &mut u64) {
    for m in msgs {
        if m.is_frame() {
            if out.try_send(m).is_err() {
                *dropped += 1;
            }
        } else {
            let _ = out.send(m).await;
        }
    }
}
