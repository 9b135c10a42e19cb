//! Machine-readable output. Floats are always written with 17 significant
//! digits so that every value round-trips exactly and output is stable
//! across platforms; object keys are sorted.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::ode::{ContainmentReport, Trajectory};
use crate::feedback::RampFeedback;
use crate::sos::Margin;
use crate::sweep::{Cell, Segment};

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // Not representable in JSON; CSV readers accept these spellings.
        format!("{v}")
    }
}

struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with sorted keys, 17 significant digits and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    // Going through `Value` sorts object keys, so re-serializing a parsed
    // report reproduces it byte for byte.
    let value = serde_json::to_value(value)?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Re-serializes a report produced by [`to_json`].
pub fn reformat(text: &str) -> serde_json::Result<String> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    to_json(&value)
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states.first().map_or(0, Vec::len);
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",N{i}");
    }
    out.push('\n');
    for (t, x) in traj.times.iter().zip(&traj.states) {
        out.push_str(&fmt_f64(*t));
        for v in x {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Sidecar describing how a trajectory left (or stayed in) its set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentSidecar {
    pub contained: bool,
    pub first_exit_time: Option<f64>,
    /// Zero-based species index.
    pub exit_axis: Option<usize>,
    pub exit_side: Option<String>,
    pub max_excursion: f64,
}

impl From<&ContainmentReport> for ContainmentSidecar {
    fn from(r: &ContainmentReport) -> Self {
        Self {
            contained: r.contained,
            first_exit_time: r.first_exit.map(|e| e.time),
            exit_axis: r.first_exit.map(|e| e.axis),
            exit_side: r.first_exit.map(|e| e.side.to_string()),
            max_excursion: r.max_excursion,
        }
    }
}

pub fn feedback_csv(laws: &[RampFeedback]) -> String {
    let mut out = String::from("control_index,b0,b1,b2,b3,low,nominal,high\n");
    for f in laws {
        let _ = write!(out, "{}", f.control_index);
        for v in [f.b0, f.b1, f.b2, f.b3, f.low_value, f.nominal, f.high_value] {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    out
}

pub fn mask_csv(cells: &[Cell]) -> String {
    let mut out = String::from("x,y,sos\n");
    for c in cells {
        let _ = writeln!(out, "{},{},{}", fmt_f64(c.x), fmt_f64(c.y), u8::from(c.sos));
    }
    out
}

pub fn polyline_csv(segments: &[Segment]) -> String {
    let mut out = String::from("segment_id,x,y\n");
    for s in segments {
        for (x, y) in &s.points {
            let _ = writeln!(out, "{},{},{}", s.id, fmt_f64(*x), fmt_f64(*y));
        }
    }
    out
}

pub fn margins_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a Margin)>) -> String {
    let mut out = String::from("method,id,value\n");
    for (method, m) in rows {
        let _ = writeln!(out, "{method},{},{}", m.id, fmt_f64(m.value));
    }
    out
}
