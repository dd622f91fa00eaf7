//! Track records and their text file format.
//!
//! ```text
//! clc-track 1
//! name hairpin
//! closed 0
//! cone 0 1.5 left
//! cone 0 -1.5 right
//! pose -0.5 0 1 0
//! gt_left 0 2 4
//! gt_right 1 3 5
//! ```
//!
//! Lines starting with `#` and blank lines are ignored. `pose` takes the
//! position and either a yaw in radians or a heading vector. Numbers are written in shortest round-trip form, so saving a
//! loaded file reproduces it byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::graph::{CarPose, ConeColor, ConeMap, DetectionConfig};
use crate::search::{check_closed_lane, check_open_lane};

const HEADER: &str = "clc-track 1";

#[derive(Clone, Debug, PartialEq)]
pub struct TrackRecord {
    pub name: String,
    pub cones: ConeMap,
    pub poses: Vec<CarPose>,
    pub gt_left: Vec<usize>,
    pub gt_right: Vec<usize>,
    pub gt_closed: bool,
}

impl TrackRecord {
    pub fn gt_points(&self) -> (Vec<Point2>, Vec<Point2>) {
        let pts = self.cones.points();
        (
            self.gt_left.iter().map(|&i| pts[i]).collect(),
            self.gt_right.iter().map(|&i| pts[i]).collect(),
        )
    }

    /// Checks GT indices, that consecutive GT cones are graph neighbours and
    /// that the GT lane satisfies the constraints of `cfg`.
    pub fn validate(&self, cfg: &DetectionConfig) -> Result<()> {
        let n = self.cones.len();
        for (side, gt) in [("gt_left", &self.gt_left), ("gt_right", &self.gt_right)] {
            if gt.is_empty() {
                return Err(Error::InvalidTrack(format!("{side} is empty")));
            }
            if let Some(&i) = gt.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidTrack(format!("{side} index {i} out of range ({n} cones)")));
            }
            let mut seen = gt.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != gt.len() {
                return Err(Error::InvalidTrack(format!("{side} repeats a cone")));
            }
        }
        if self.gt_left.iter().any(|i| self.gt_right.contains(i)) {
            return Err(Error::InvalidTrack("a cone is on both boundaries".into()));
        }
        let (l, r) = self.gt_points();
        for (side, pts) in [("gt_left", &l), ("gt_right", &r)] {
            let mut gaps: Vec<f64> = pts.windows(2).map(|w| w[0].dist(w[1])).collect();
            if self.gt_closed {
                gaps.push(pts[0].dist(pts[pts.len() - 1]));
            }
            if gaps.iter().any(|&g| g > cfg.d_max) {
                return Err(Error::InvalidTrack(format!("{side} has consecutive cones farther apart than d_max")));
            }
        }
        let ok = if self.gt_closed {
            check_closed_lane(&l, &r, cfg)
        } else {
            check_open_lane(&l, &r, cfg)
        };
        if !ok {
            return Err(Error::InvalidTrack(format!("ground-truth lane of '{}' violates the lane constraints", self.name)));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{HEADER}");
        let _ = writeln!(s, "name {}", self.name);
        let _ = writeln!(s, "closed {}", self.gt_closed as u8);
        for (p, c) in self.cones.points().iter().zip(self.cones.colors()) {
            let _ = writeln!(s, "cone {} {} {}", p.x, p.y, c.as_str());
        }
        for pose in &self.poses {
            let (p, h) = (pose.position, pose.heading);
            let _ = writeln!(s, "pose {} {} {} {}", p.x, p.y, h.x, h.y);
        }
        let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        if !self.gt_left.is_empty() || !self.gt_right.is_empty() {
            let _ = writeln!(s, "gt_left {}", join(&self.gt_left));
            let _ = writeln!(s, "gt_right {}", join(&self.gt_right));
        }
        s
    }

    /// Parses a track; `origin` names the source in error messages.
    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut lines = lines.by_ref().filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, l)) if l == HEADER => {}
            Some((n, _)) => return Err(err(n, format!("expected header '{HEADER}'"))),
            None => return Err(err(1, "empty file".into())),
        }
        let mut name = None;
        let mut closed = false;
        let mut points = Vec::new();
        let mut colors = Vec::new();
        let mut poses = Vec::new();
        let mut gt_left = None;
        let mut gt_right = None;
        for (n, line) in lines {
            let mut it = line.split_whitespace();
            let key = it.next().unwrap_or_default();
            let rest: Vec<&str> = it.collect();
            let num = |s: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|_| err(n, format!("invalid number '{s}'")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(n, format!("non-finite number '{s}'")))
                }
            };
            let idx = |s: &&str| -> Result<usize> { s.parse().map_err(|_| err(n, format!("invalid index '{s}'"))) };
            match key {
                "name" => name = Some(rest.join(" ")),
                "closed" => {
                    closed = match rest.as_slice() {
                        ["0"] => false,
                        ["1"] => true,
                        _ => return Err(err(n, "closed takes 0 or 1".into())),
                    }
                }
                "cone" => {
                    if !(2..=3).contains(&rest.len()) {
                        return Err(err(n, "cone takes x y [color]".into()));
                    }
                    points.push(Point2::new(num(rest[0])?, num(rest[1])?));
                    let c = match rest.get(2) {
                        Some(s) => ConeColor::parse(s).ok_or_else(|| err(n, format!("unknown color '{s}'")))?,
                        None => ConeColor::Unknown,
                    };
                    colors.push(c);
                }
                "pose" => {
                    let position = match rest.as_slice() {
                        [x, y, ..] => Point2::new(num(x)?, num(y)?),
                        _ => return Err(err(n, "pose takes x y yaw or x y hx hy".into())),
                    };
                    let pose = match rest.as_slice() {
                        [_, _, yaw] => CarPose::from_yaw(position, num(yaw)?),
                        [_, _, hx, hy] => {
                            let heading = Point2::new(num(hx)?, num(hy)?);
                            if (heading.norm() - 1.0).abs() < 1e-12 {
                                CarPose { position, heading }
                            } else {
                                CarPose::new(position, heading).map_err(|e| err(n, e.to_string()))?
                            }
                        }
                        _ => return Err(err(n, "pose takes x y yaw or x y hx hy".into())),
                    };
                    poses.push(pose);
                }
                "gt_left" => gt_left = Some(rest.iter().map(idx).collect::<Result<Vec<_>>>()?),
                "gt_right" => gt_right = Some(rest.iter().map(idx).collect::<Result<Vec<_>>>()?),
                other => return Err(err(n, format!("unknown record '{other}'"))),
            }
        }
        let raw_count = points.len();
        let (cones, mapping) = ConeMap::with_colors(points, colors)?;
        let remap = |v: Vec<usize>, side: &str| -> Result<Vec<usize>> {
            v.into_iter()
                .map(|i| {
                    mapping.get(i).copied().ok_or_else(|| {
                        Error::InvalidTrack(format!("{side} index {i} out of range ({raw_count} cones)"))
                    })
                })
                .collect()
        };
        Ok(TrackRecord {
            name: name.unwrap_or_else(|| origin.to_string()),
            cones,
            poses,
            gt_left: remap(gt_left.unwrap_or_default(), "gt_left")?,
            gt_right: remap(gt_right.unwrap_or_default(), "gt_right")?,
            gt_closed: closed,
        })
    }
}

/// Loads and validates a track under the default detection constraints.
pub fn load_track(path: &Path) -> Result<TrackRecord> {
    let text = fs::read_to_string(path)?;
    let t = TrackRecord::from_text(&text, &path.display().to_string())?;
    t.validate(&DetectionConfig::default())?;
    Ok(t)
}

/// Loads a map file without requiring a valid ground-truth lane.
pub fn load_map(path: &Path) -> Result<TrackRecord> {
    let text = fs::read_to_string(path)?;
    TrackRecord::from_text(&text, &path.display().to_string())
}

pub fn save_track(track: &TrackRecord, path: &Path) -> Result<()> {
    fs::write(path, track.to_text())?;
    Ok(())
}
