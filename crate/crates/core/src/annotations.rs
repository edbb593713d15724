//! Reader for LabelMe-style annotation JSON: rectangles annotate gate
//! locations, lines annotate the vessel direction under each rectangle.
//! Only `shapes[].shape_type`, `shapes[].points`, and `shapes[].label` are
//! read.

use serde::Deserialize;
use thiserror::Error;

use crate::image::Point;
use crate::probe::GateCandidate;

#[derive(Debug, Error, PartialEq)]
pub enum AnnotationError {
    #[error("malformed annotation document: {0}")]
    Malformed(String),
    #[error("annotation mismatch: {0:?}")]
    Mismatch(Vec<String>),
}

#[derive(Debug, Deserialize)]
struct Document {
    #[serde(default)]
    shapes: Vec<Shape>,
}

#[derive(Debug, Deserialize)]
struct Shape {
    #[serde(default)]
    label: String,
    shape_type: String,
    points: Vec<[f64; 2]>,
}

/// Undirected angle of the segment (x1,y1)→(x2,y2) in degrees, folded to
/// [0, 180), y-down convention.
pub fn segment_angle_deg(p1: [f64; 2], p2: [f64; 2]) -> f64 {
    let mut ang = (p2[1] - p1[1]).atan2(p2[0] - p1[0]).to_degrees();
    if ang < 0.0 {
        ang += 180.0;
    }
    if ang >= 180.0 {
        ang -= 180.0;
    }
    ang
}

/// Parse a LabelMe document and pair each rectangle with the single line
/// whose midpoint it contains. Ground-truth candidates carry score 1.
pub fn read_annotations(json: &str) -> Result<Vec<GateCandidate>, AnnotationError> {
    let doc: Document =
        serde_json::from_str(json).map_err(|e| AnnotationError::Malformed(e.to_string()))?;

    let mut rects = Vec::new();
    let mut lines = Vec::new();
    for (i, shape) in doc.shapes.iter().enumerate() {
        match shape.shape_type.as_str() {
            "rectangle" => {
                if shape.points.len() != 2 {
                    return Err(AnnotationError::Malformed(format!(
                        "rectangle '{}' (shape {i}) has {} points, expected 2",
                        shape.label,
                        shape.points.len()
                    )));
                }
                rects.push((i, shape));
            }
            "line" => {
                if shape.points.len() != 2 {
                    return Err(AnnotationError::Malformed(format!(
                        "line '{}' (shape {i}) has {} points, expected 2",
                        shape.label,
                        shape.points.len()
                    )));
                }
                lines.push((i, shape));
            }
            _ => {} // other shape types are ignored
        }
    }

    let rect_bounds: Vec<(Point, Point)> = rects
        .iter()
        .map(|(_, s)| {
            let (a, b) = (s.points[0], s.points[1]);
            (
                Point::new(a[0].min(b[0]), a[1].min(b[1])),
                Point::new(a[0].max(b[0]), a[1].max(b[1])),
            )
        })
        .collect();

    let mut lines_per_rect: Vec<Vec<usize>> = vec![Vec::new(); rects.len()];
    let mut offenders = Vec::new();

    for (li, (si, line)) in lines.iter().enumerate() {
        let mid = [
            (line.points[0][0] + line.points[1][0]) / 2.0,
            (line.points[0][1] + line.points[1][1]) / 2.0,
        ];
        let containing: Vec<usize> = rect_bounds
            .iter()
            .enumerate()
            .filter(|(_, (lo, hi))| {
                mid[0] >= lo.x && mid[0] <= hi.x && mid[1] >= lo.y && mid[1] <= hi.y
            })
            .map(|(r, _)| r)
            .collect();
        match containing.len() {
            1 => lines_per_rect[containing[0]].push(li),
            0 => offenders.push(format!(
                "line '{}' (shape {si}) matches no rectangle",
                line.label
            )),
            _ => offenders.push(format!(
                "line '{}' (shape {si}) falls inside {} rectangles",
                line.label,
                containing.len()
            )),
        }
    }

    let mut out = Vec::new();
    for (r, line_ids) in lines_per_rect.iter().enumerate() {
        let (si, _) = rects[r];
        match line_ids.len() {
            1 => {
                let (_, line) = lines[line_ids[0]];
                out.push(GateCandidate {
                    box_min: rect_bounds[r].0,
                    box_max: rect_bounds[r].1,
                    vessel_angle_deg: segment_angle_deg(line.points[0], line.points[1]),
                    score: 1.0,
                });
            }
            0 => offenders.push(format!(
                "rectangle '{}' (shape {si}) contains no line",
                rects[r].1.label
            )),
            n => offenders.push(format!(
                "rectangle '{}' (shape {si}) contains {n} lines",
                rects[r].1.label
            )),
        }
    }

    if !offenders.is_empty() {
        return Err(AnnotationError::Mismatch(offenders));
    }
    Ok(out)
}
