//! Live world session protocol. Messages are JSON objects tagged by
//! `type`; [`Session`] is the transport-independent state machine.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::evaluator::{Interp, Value};
use crate::images::Scene;
use crate::universe::{self, Event, EventTrace};

pub const PROTOCOL_VERSION: &str = "1";

/// Frame queue length past which a slow client starts missing frames.
pub const MAX_FRAME_LAG: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ServerMessage {
    Hello {
        #[serde(rename = "protocol-version")]
        protocol_version: String,
        #[serde(rename = "scene-width-hint", default, skip_serializing_if = "Option::is_none")]
        scene_width_hint: Option<f64>,
    },
    Frame {
        seq: u64,
        scene: Scene,
        world: String,
    },
    Halt {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClientMessage {
    /// Optional; a client that sends it must speak our version.
    Hello {
        #[serde(rename = "protocol-version")]
        protocol_version: String,
    },
    Key {
        key: String,
    },
    Bye,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("protocol error: {0}")]
pub struct ProtocolError(pub String);

pub fn encode<M: Serialize>(msg: &M) -> String {
    serde_json::to_string(msg).expect("protocol messages serialize")
}

pub fn decode_client(text: &str) -> Result<ClientMessage, ProtocolError> {
    serde_json::from_str(text).map_err(|e| ProtocolError(e.to_string()))
}

pub fn decode_server(text: &str) -> Result<ServerMessage, ProtocolError> {
    serde_json::from_str(text).map_err(|e| ProtocolError(e.to_string()))
}

impl ServerMessage {
    pub fn is_frame(&self) -> bool {
        matches!(self, ServerMessage::Frame { .. })
    }
}

/// Something that happened to a session, in the order it is processed.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Tick,
    /// A raw text message from the client.
    Client(String),
    Disconnected,
}

/// One live world. Feed it inputs; it answers with messages to send.
#[derive(Debug, Clone)]
pub struct Session {
    interp: Arc<Interp>,
    world: Value,
    seq: u64,
    events: Vec<Event>,
    halted: Option<String>,
}

impl Session {
    /// Opens a session: `hello`, then the initial frame (or a `halt` if the
    /// world cannot start).
    pub fn start(interp: Arc<Interp>, initial: Value) -> (Session, Vec<ServerMessage>) {
        let mut s = Session { interp, world: initial, seq: 0, events: Vec::new(), halted: None };
        let mut out = Vec::new();
        let setup = universe::check_world(&s.interp, &s.world).and_then(|_| universe::draw(&s.interp, &s.world));
        let hint = setup.as_ref().ok().map(|scene| scene.size().0);
        out.push(ServerMessage::Hello { protocol_version: PROTOCOL_VERSION.into(), scene_width_hint: hint });
        match setup {
            Ok(scene) => {
                out.push(s.frame_message(scene));
                s.check_stop(&mut out);
            }
            Err(e) => s.halt(e.to_string(), &mut out),
        }
        (s, out)
    }

    pub fn world(&self) -> &Value {
        &self.world
    }

    pub fn is_halted(&self) -> bool {
        self.halted.is_some()
    }

    pub fn halt_reason(&self) -> Option<&str> {
        self.halted.as_deref()
    }

    /// Every event processed so far, as a replayable trace.
    pub fn event_log(&self) -> EventTrace {
        EventTrace::new(self.events.clone())
    }

    pub fn handle(&mut self, input: Input) -> Vec<ServerMessage> {
        let mut out = Vec::new();
        if self.is_halted() {
            return out;
        }
        match input {
            Input::Tick => self.process(Event::Tick, &mut out),
            Input::Disconnected => self.halted = Some("disconnected".into()),
            Input::Client(text) => match decode_client(&text) {
                Err(_) => self.halt("protocol error".into(), &mut out),
                Ok(ClientMessage::Hello { protocol_version }) if protocol_version != PROTOCOL_VERSION => self.halt(
                    format!("protocol version mismatch: server speaks {PROTOCOL_VERSION}, client sent {protocol_version}"),
                    &mut out,
                ),
                Ok(ClientMessage::Hello { .. }) => {}
                Ok(ClientMessage::Key { key }) => match Event::key(&key) {
                    Ok(event) => self.process(event, &mut out),
                    Err(_) => self.halt("protocol error".into(), &mut out),
                },
                Ok(ClientMessage::Bye) => self.halt("stopped".into(), &mut out),
            },
        }
        out
    }

    fn process(&mut self, event: Event, out: &mut Vec<ServerMessage>) {
        let step = universe::step(&self.interp, &self.world, &event);
        self.events.push(event);
        match step.and_then(|w| universe::draw(&self.interp, &w).map(|scene| (w, scene))) {
            Ok((world, scene)) => {
                self.world = world;
                self.seq += 1;
                out.push(self.frame_message(scene));
                self.check_stop(out);
            }
            Err(e) => self.halt(e.to_string(), out),
        }
    }

    fn check_stop(&mut self, out: &mut Vec<ServerMessage>) {
        match universe::stop_requested(&self.interp, &self.world) {
            Ok(false) => {}
            Ok(true) => self.halt("stopped".into(), out),
            Err(e) => self.halt(e.to_string(), out),
        }
    }

    fn frame_message(&self, scene: Arc<Scene>) -> ServerMessage {
        ServerMessage::Frame { seq: self.seq, scene: (*scene).clone(), world: self.world.to_string() }
    }

    fn halt(&mut self, reason: String, out: &mut Vec<ServerMessage>) {
        out.push(ServerMessage::Halt { reason: reason.clone() });
        self.halted = Some(reason);
    }
}

/// Runs a session over `inputs` until it halts or the inputs run out,
/// passing every outgoing message to `send`. Returns the final world.
pub fn run_live(
    interp: Arc<Interp>,
    initial: Value,
    inputs: impl IntoIterator<Item = Input>,
    mut send: impl FnMut(ServerMessage),
) -> (Value, Session) {
    let (mut session, hello) = Session::start(interp, initial);
    hello.into_iter().for_each(&mut send);
    for input in inputs {
        if session.is_halted() {
            break;
        }
        session.handle(input).into_iter().for_each(&mut send);
    }
    (session.world().clone(), session)
}
