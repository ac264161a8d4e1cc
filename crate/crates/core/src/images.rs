//! Structural images: `empty-scene`, `circle`, and `place-image`.
//!
//! Scenes are plain trees. Two scenes are equal when they were built the
//! same way; no rasterization happens, so two constructions that look alike
//! on screen can still differ.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::syntax::write_string_literal;
use crate::Number;

/// The accepted color names.
pub const PALETTE: [&str; 16] = [
    "black", "silver", "gray", "white", "maroon", "red", "purple", "fuchsia", "green", "lime", "olive",
    "yellow", "navy", "blue", "teal", "aqua",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Color(&'static str);

impl Color {
    /// Case-insensitive lookup in [`PALETTE`].
    pub fn named(name: &str) -> Option<Color> {
        let lower = name.to_ascii_lowercase();
        PALETTE.iter().find(|c| **c == lower).map(|c| Color(c))
    }

    pub fn name(self) -> &'static str {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Solid,
    Outline,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "solid" => Some(Mode::Solid),
            "outline" => Some(Mode::Outline),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Solid => "solid",
            Mode::Outline => "outline",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scene {
    EmptyScene {
        width: Number,
        height: Number,
    },
    Circle {
        radius: Number,
        mode: Mode,
        color: Color,
    },
    /// `image` centered at (`x`, `y`) on `scene`, with the origin at the top
    /// left and y growing downward.
    PlaceImage {
        image: Arc<Scene>,
        x: Number,
        y: Number,
        scene: Arc<Scene>,
    },
}

pub fn circle(radius: Number, mode: &str, color: &str) -> Result<Scene> {
    if !radius.is_positive() {
        return Err(Error::runtime(format!("circle: expected a positive radius, given {radius}")));
    }
    let mode = Mode::parse(mode)
        .ok_or_else(|| Error::runtime(format!("circle: expected \"solid\" or \"outline\" as the mode, given \"{mode}\"")))?;
    let color =
        Color::named(color).ok_or_else(|| Error::runtime(format!("circle: unknown color \"{color}\"")))?;
    Ok(Scene::Circle { radius, mode, color })
}

pub fn empty_scene(width: Number, height: Number) -> Result<Scene> {
    for (what, n) in [("width", &width), ("height", &height)] {
        if n.is_negative() {
            return Err(Error::runtime(format!("empty-scene: expected a non-negative {what}, given {n}")));
        }
    }
    Ok(Scene::EmptyScene { width, height })
}

/// Coordinates are kept as given; anything outside the scene is clipped when
/// rendering.
pub fn place_image(image: Arc<Scene>, x: Number, y: Number, scene: Arc<Scene>) -> Result<Scene> {
    if !scene.is_scene_rooted() {
        return Err(Error::runtime("place-image: expected a scene as the fourth argument, given a circle"));
    }
    Ok(Scene::PlaceImage { image, x, y, scene })
}

impl Scene {
    /// Whether this is an empty scene or something placed onto one.
    pub fn is_scene_rooted(&self) -> bool {
        !matches!(self, Scene::Circle { .. })
    }

    /// Width and height of the bounding box, as floats.
    pub fn size(&self) -> (f64, f64) {
        match self {
            Scene::EmptyScene { width, height } => (width.to_float(), height.to_float()),
            Scene::Circle { radius, .. } => {
                let d = 2.0 * radius.to_float();
                (d, d)
            }
            Scene::PlaceImage { scene, .. } => scene.size(),
        }
    }

    /// Structural equality with numbers compared across exactness.
    pub fn same_as(&self, other: &Scene) -> bool {
        match (self, other) {
            (Scene::EmptyScene { width: w1, height: h1 }, Scene::EmptyScene { width: w2, height: h2 }) => {
                w1.num_eq(w2) && h1.num_eq(h2)
            }
            (
                Scene::Circle { radius: r1, mode: m1, color: c1 },
                Scene::Circle { radius: r2, mode: m2, color: c2 },
            ) => r1.num_eq(r2) && m1 == m2 && c1 == c2,
            (
                Scene::PlaceImage { image: i1, x: x1, y: y1, scene: s1 },
                Scene::PlaceImage { image: i2, x: x2, y: y2, scene: s2 },
            ) => x1.num_eq(x2) && y1.num_eq(y2) && i1.same_as(i2) && s1.same_as(s2),
            _ => false,
        }
    }

    /// The scene as compact JSON text.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("scene serializes")
    }
}

/// Constructor syntax, e.g. `(circle 10 "solid" "red")`.
impl fmt::Display for Scene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scene::EmptyScene { width, height } => write!(f, "(empty-scene {width} {height})"),
            Scene::Circle { radius, mode, color } => {
                write!(f, "(circle {radius} ")?;
                write_string_literal(f, mode.name())?;
                f.write_char(' ')?;
                write_string_literal(f, color.name())?;
                f.write_char(')')
            }
            Scene::PlaceImage { image, x, y, scene } => write!(f, "(place-image {image} {x} {y} {scene})"),
        }
    }
}

/// Decimal text with at most six fractional digits.
pub fn format_coordinate(x: f64) -> String {
    let mut s = format!("{x:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Deterministic SVG. Paint order follows nesting: a place-image paints its
/// scene first, then the placed image on top.
pub fn render_svg(scene: &Scene) -> String {
    let (w, h) = scene.size();
    let (w, h) = (format_coordinate(w), format_coordinate(h));
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    render_node(&mut out, scene, 0.0, 0.0, true);
    out.push_str("</svg>\n");
    out
}

fn render_node(out: &mut String, scene: &Scene, left: f64, top: f64, root: bool) {
    let c = format_coordinate;
    match scene {
        Scene::EmptyScene { .. } => {
            let (w, h) = scene.size();
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
                c(left),
                c(top),
                c(w),
                c(h)
            );
        }
        Scene::Circle { radius, mode, color } => {
            let r = radius.to_float();
            let paint = match mode {
                Mode::Solid => format!("fill=\"{}\"", color.name()),
                Mode::Outline => format!("fill=\"none\" stroke=\"{}\"", color.name()),
            };
            let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {paint}/>", c(left + r), c(top + r), c(r));
        }
        Scene::PlaceImage { image, x, y, scene: base } => {
            // Nested scenes clip to their own bounds.
            let (ox, oy) = if root {
                (left, top)
            } else {
                let (w, h) = scene.size();
                let _ = writeln!(
                    out,
                    "<svg x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\">",
                    c(left),
                    c(top),
                    c(w),
                    c(h)
                );
                (0.0, 0.0)
            };
            render_node(out, base, ox, oy, false);
            let (iw, ih) = image.size();
            render_node(out, image, ox + x.to_float() - iw / 2.0, oy + y.to_float() - ih / 2.0, false);
            if !root {
                out.push_str("</svg>\n");
            }
        }
    }
}

/// A JSON number that prints integral values without a fraction.
#[derive(Debug, Clone, Copy)]
struct JsonNumber(f64);

impl Serialize for JsonNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = self.0;
        if x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15 {
            s.serialize_i64(x as i64)
        } else {
            s.serialize_f64(x)
        }
    }
}

impl<'de> Deserialize<'de> for JsonNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(JsonNumber)
    }
}

impl From<&Number> for JsonNumber {
    fn from(n: &Number) -> Self {
        JsonNumber(n.to_float())
    }
}

impl From<JsonNumber> for Number {
    fn from(n: JsonNumber) -> Self {
        if n.0.fract() == 0.0 && n.0.abs() < 9.007_199_254_740_992e15 {
            Number::integer(n.0 as i64)
        } else {
            Number::Inexact(n.0)
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum SceneJson {
    EmptyScene {
        width: JsonNumber,
        height: JsonNumber,
    },
    Circle {
        radius: JsonNumber,
        mode: String,
        color: String,
    },
    PlaceImage {
        image: Box<SceneJson>,
        x: JsonNumber,
        y: JsonNumber,
        scene: Box<SceneJson>,
    },
}

impl From<&Scene> for SceneJson {
    fn from(s: &Scene) -> Self {
        match s {
            Scene::EmptyScene { width, height } => SceneJson::EmptyScene { width: width.into(), height: height.into() },
            Scene::Circle { radius, mode, color } => SceneJson::Circle {
                radius: radius.into(),
                mode: mode.name().into(),
                color: color.name().into(),
            },
            Scene::PlaceImage { image, x, y, scene } => SceneJson::PlaceImage {
                image: Box::new(image.as_ref().into()),
                x: x.into(),
                y: y.into(),
                scene: Box::new(scene.as_ref().into()),
            },
        }
    }
}

impl TryFrom<SceneJson> for Scene {
    type Error = Error;

    fn try_from(j: SceneJson) -> Result<Scene> {
        match j {
            SceneJson::EmptyScene { width, height } => empty_scene(width.into(), height.into()),
            SceneJson::Circle { radius, mode, color } => circle(radius.into(), &mode, &color),
            SceneJson::PlaceImage { image, x, y, scene } => place_image(
                Arc::new(Scene::try_from(*image)?),
                x.into(),
                y.into(),
                Arc::new(Scene::try_from(*scene)?),
            ),
        }
    }
}

impl Serialize for Scene {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SceneJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scene {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SceneJson::deserialize(d)?;
        Scene::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: i64) -> Number {
        Number::integer(x)
    }

    fn red_dot() -> Arc<Scene> {
        Arc::new(circle(n(10), "solid", "red").unwrap())
    }

    fn frame_at(x: i64) -> Scene {
        place_image(red_dot(), n(x), n(200), Arc::new(empty_scene(n(400), n(400)).unwrap())).unwrap()
    }

    #[test]
    fn circle_validation() {
        assert_eq!(
            circle(n(10), "solid", "red").unwrap(),
            Scene::Circle { radius: n(10), mode: Mode::Solid, color: Color::named("red").unwrap() }
        );
        assert!(circle(n(0), "solid", "red").is_err());
        assert!(circle(n(-1), "solid", "red").is_err());
        assert!(circle(n(10), "fuzzy", "red").unwrap_err().to_string().contains("mode"));
        assert!(circle(n(10), "solid", "chartreuse").is_err());
        assert_eq!(circle(n(1), "outline", "RED").unwrap().to_string(), "(circle 1 \"outline\" \"red\")");
    }

    #[test]
    fn empty_scene_validation() {
        assert!(empty_scene(n(400), n(400)).is_ok());
        assert!(empty_scene(n(0), n(0)).is_ok());
        assert!(empty_scene(n(-1), n(5)).is_err());
    }

    #[test]
    fn place_image_requires_scene_base() {
        assert!(place_image(red_dot(), n(1), n(1), red_dot()).is_err());
        let base = Arc::new(frame_at(10));
        let nested = place_image(base.clone(), n(0), n(0), base).unwrap();
        assert!(matches!(nested, Scene::PlaceImage { .. }));
    }

    #[test]
    fn json_matches_schema() {
        assert_eq!(
            empty_scene(n(400), n(400)).unwrap().to_json_string(),
            r#"{"type":"empty-scene","width":400,"height":400}"#
        );
        assert_eq!(
            frame_at(10).to_json_string(),
            concat!(
                r#"{"type":"place-image","image":{"type":"circle","radius":10,"mode":"solid","color":"red"},"#,
                r#""x":10,"y":200,"scene":{"type":"empty-scene","width":400,"height":400}}"#
            )
        );
        let third = place_image(
            red_dot(),
            Number::ratio(1, 3).unwrap(),
            Number::Inexact(2.5),
            Arc::new(empty_scene(n(4), n(4)).unwrap()),
        )
        .unwrap();
        let json = third.to_json_string();
        assert!(json.contains(r#""x":0.3333333333333333,"y":2.5"#), "{json}");
    }

    #[test]
    fn json_round_trip_for_integral_scenes() {
        let s = frame_at(390);
        let back: Scene = serde_json::from_str(&s.to_json_string()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Scene>(r#"{"type":"square","side":1}"#).is_err());
    }

    #[test]
    fn svg_for_empty_scene() {
        let svg = render_svg(&empty_scene(n(400), n(400)).unwrap());
        assert!(svg.contains("viewBox=\"0 0 400 400\""));
        assert!(svg.contains("<rect x=\"0\" y=\"0\" width=\"400\" height=\"400\" fill=\"white\"/>"));
    }

    #[test]
    fn svg_places_circle_centered() {
        let svg = render_svg(&frame_at(10));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("<circle cx=\"10\" cy=\"200\" r=\"10\" fill=\"red\"/>"), "{svg}");
        let rect = svg.find("<rect").unwrap();
        let circ = svg.find("<circle").unwrap();
        assert!(rect < circ, "scene paints before the placed image");
        assert!(render_svg(&frame_at(390)).contains("cx=\"390\""));
        assert_eq!(render_svg(&frame_at(10)), svg);
    }

    #[test]
    fn svg_keeps_out_of_bounds_coordinates() {
        let svg = render_svg(&frame_at(-30));
        assert!(svg.contains("cx=\"-30\""));
        let exact = place_image(
            red_dot(),
            Number::ratio(1, 3).unwrap(),
            n(0),
            Arc::new(empty_scene(n(4), n(4)).unwrap()),
        )
        .unwrap();
        assert!(render_svg(&exact).contains("cx=\"0.333333\""));
    }

    #[test]
    fn structural_not_visual_equality() {
        // Same pixels, different construction.
        let base = Arc::new(empty_scene(n(400), n(400)).unwrap());
        let once = place_image(red_dot(), n(10), n(200), base.clone()).unwrap();
        let twice = place_image(red_dot(), n(10), n(200), Arc::new(once.clone())).unwrap();
        assert!(!once.same_as(&twice));
        assert_ne!(once, twice);
        let inexact = place_image(red_dot(), Number::Inexact(10.0), n(200), base).unwrap();
        assert!(once.same_as(&inexact));
    }

    #[test]
    fn coordinate_formatting() {
        assert_eq!(format_coordinate(10.0), "10");
        assert_eq!(format_coordinate(2.5), "2.5");
        assert_eq!(format_coordinate(1.0 / 3.0), "0.333333");
        assert_eq!(format_coordinate(-0.0), "0");
        assert_eq!(format_coordinate(-0.0000001), "0");
    }
}
