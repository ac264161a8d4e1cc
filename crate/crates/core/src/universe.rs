//! Object-oriented `big-bang`: a world is an object, events are messages.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::{fs, io};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{Interp, Value};
use crate::images::{render_svg, Scene};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Tick,
    Key(String),
}

/// One line of a trace file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum EventLine {
    Tick,
    Key { key: String },
    #[serde(skip_serializing)]
    Mouse(serde::de::IgnoredAny),
}

impl Event {
    pub fn key(k: &str) -> Result<Event> {
        if k.is_empty() {
            return Err(Error::runtime("key event: key name must not be empty"));
        }
        Ok(Event::Key(k.to_string()))
    }

    pub fn to_json(&self) -> String {
        let line = match self {
            Event::Tick => EventLine::Tick,
            Event::Key(key) => EventLine::Key { key: key.clone() },
        };
        serde_json::to_string(&line).expect("event serializes")
    }
}

/// An ordered, finite sequence of events.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventTrace {
    pub events: Vec<Event>,
    /// Stop after this many frames (the initial frame included).
    pub max_frames: Option<usize>,
}

impl EventTrace {
    pub fn new(events: Vec<Event>) -> Self {
        EventTrace { events, max_frames: None }
    }

    pub fn ticks(n: usize) -> Self {
        EventTrace::new(vec![Event::Tick; n])
    }

    /// Parses JSON Lines. Blank lines are skipped.
    pub fn parse_jsonl(text: &str) -> Result<Self> {
        let mut events = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Setup(format!("trace line {}: {msg}", i + 1));
            let parsed: EventLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            events.push(match parsed {
                EventLine::Tick => Event::Tick,
                EventLine::Key { key } => Event::key(&key).map_err(|e| bad(e.to_string()))?,
                EventLine::Mouse(_) => return Err(bad("mouse events unsupported".into())),
            });
        }
        Ok(EventTrace::new(events))
    }

    pub fn to_jsonl(&self) -> String {
        self.events.iter().fold(String::new(), |mut out, e| {
            let _ = writeln!(out, "{}", e.to_json());
            out
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// 0 for the initial world, then the number of events processed.
    pub step: usize,
    pub scene: Arc<Scene>,
    pub world: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameLog {
    pub frames: Vec<Frame>,
}

impl FrameLog {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// One scene JSON object per line, in frame order.
    pub fn scenes_jsonl(&self) -> String {
        self.frames.iter().fold(String::new(), |mut out, f| {
            let _ = writeln!(out, "{}", f.scene.to_json_string());
            out
        })
    }

    /// Writes `frame-NNNN.svg` for every frame and `frames.jsonl`.
    pub fn export(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for f in &self.frames {
            fs::write(dir.join(format!("frame-{:04}.svg", f.step)), render_svg(&f.scene))?;
        }
        fs::write(dir.join("frames.jsonl"), self.scenes_jsonl())
    }
}

/// Checks that `world` can start a `big-bang`: an object whose class
/// provides `to-draw`.
pub fn check_world(interp: &Interp, world: &Value) -> Result<()> {
    let Value::Object(obj) = world else {
        return Err(Error::Setup(format!("expected an object as the initial world, given {world}")));
    };
    if !interp.classes().responds_to(&obj.class, "to-draw") {
        return Err(Error::Setup(format!("class `{}` has no to-draw method", obj.class)));
    }
    Ok(())
}

/// The next world. A missing handler leaves the world unchanged.
pub fn step(interp: &Interp, world: &Value, event: &Event) -> Result<Value> {
    let (message, args) = match event {
        Event::Tick => ("on-tick", vec![]),
        Event::Key(k) => ("on-key", vec![Value::string(k)]),
    };
    let Value::Object(obj) = world else {
        return Err(Error::runtime(format!("big-bang: the world must be an object, given {world}")));
    };
    if !interp.classes().responds_to(&obj.class, message) {
        return Ok(world.clone());
    }
    match interp.dispatch(world, message, args)? {
        next @ Value::Object(_) => Ok(next),
        other => Err(Error::runtime(format!("{message}: handler must return a world, given {other}"))),
    }
}

pub fn draw(interp: &Interp, world: &Value) -> Result<Arc<Scene>> {
    match interp.dispatch(world, "to-draw", vec![])? {
        Value::Scene(s) if s.is_scene_rooted() => Ok(s),
        other => Err(Error::runtime(format!("to-draw: expected a scene, given {other}"))),
    }
}

/// Whether the world's optional `stop-when` method says to stop.
pub fn stop_requested(interp: &Interp, world: &Value) -> Result<bool> {
    let Some(obj) = world.as_object() else { return Ok(false) };
    if !interp.classes().responds_to(&obj.class, "stop-when") {
        return Ok(false);
    }
    match interp.dispatch(world, "stop-when", vec![])? {
        Value::Bool(b) => Ok(b),
        other => Err(Error::runtime(format!("stop-when: expected a boolean, given {other}"))),
    }
}

pub fn frame(interp: &Interp, world: &Value, step: usize) -> Result<Frame> {
    let scene = draw(interp, world).map_err(|e| Error::World { step, source: Box::new(e) })?;
    Ok(Frame { step, scene, world: world.to_string() })
}

/// Folds `step` over the trace, drawing the initial world and after every
/// event. `stop-when` is not consulted; the run ends with the trace.
pub fn run_headless(interp: &Interp, initial: &Value, trace: &EventTrace) -> Result<(Value, FrameLog)> {
    check_world(interp, initial)?;
    let mut world = initial.clone();
    let mut log = FrameLog { frames: vec![frame(interp, &world, 0)?] };
    let limit = trace.max_frames.unwrap_or(usize::MAX);
    for (i, event) in trace.events.iter().enumerate() {
        if log.len() >= limit {
            break;
        }
        let n = i + 1;
        world = step(interp, &world, event).map_err(|e| Error::World { step: n, source: Box::new(e) })?;
        log.frames.push(frame(interp, &world, n)?);
    }
    Ok((world, log))
}
