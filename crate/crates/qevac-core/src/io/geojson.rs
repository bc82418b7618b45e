//! Minimal GeoJSON reader/writer for the two vector inputs.
//!
//! Accepts FeatureCollections of Polygon features in planar meter
//! coordinates. Feature ids come from the `id` member, an `id` property,
//! or the feature index, in that order.

use super::{validate_door, validate_polygon, BuildingInput, SpaceInput};
use crate::geom::{Point2D, Polygon2D};
use serde_json::Value;

fn feature_id(feature: &Value, index: usize) -> Option<u32> {
    feature
        .get("id")
        .or_else(|| feature.pointer("/properties/id"))
        .and_then(Value::as_u64)
        .map(|v| v as u32)
        .or(Some(index as u32))
}

fn parse_polygon(geometry: &Value, what: &str, errors: &mut Vec<String>) -> Option<Polygon2D> {
    let gtype = geometry.get("type").and_then(Value::as_str).unwrap_or("");
    if gtype != "Polygon" {
        errors.push(format!("{what}: unsupported geometry type `{gtype}` (expected Polygon)"));
        return None;
    }
    let rings = geometry.get("coordinates").and_then(Value::as_array)?;
    let mut parsed: Vec<Vec<Point2D>> = Vec::new();
    for ring in rings {
        let Some(coords) = ring.as_array() else {
            errors.push(format!("{what}: malformed ring"));
            return None;
        };
        let mut pts = Vec::with_capacity(coords.len());
        for c in coords {
            let pair = c.as_array();
            let (x, y) = match pair.and_then(|p| {
                Some((p.first()?.as_f64()?, p.get(1)?.as_f64()?))
            }) {
                Some(xy) => xy,
                None => {
                    errors.push(format!("{what}: malformed coordinate"));
                    return None;
                }
            };
            pts.push(Point2D::new(x, y));
        }
        parsed.push(pts);
    }
    if parsed.is_empty() {
        errors.push(format!("{what}: polygon without rings"));
        return None;
    }
    let exterior = parsed.remove(0);
    match Polygon2D::new(exterior, parsed) {
        Ok(p) => {
            if validate_polygon(&p, what, errors) {
                Some(p)
            } else {
                None
            }
        }
        Err(e) => {
            errors.push(format!("{what}: {e}"));
            None
        }
    }
}

fn features<'a>(text: &'a str, file: &str, errors: &mut Vec<String>) -> Vec<Value> {
    let root: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            errors.push(format!("{file}: invalid JSON: {e}"));
            return Vec::new();
        }
    };
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        errors.push(format!("{file}: expected a FeatureCollection"));
        return Vec::new();
    }
    match root.get("features").and_then(Value::as_array) {
        Some(f) => f.to_vec(),
        None => {
            errors.push(format!("{file}: FeatureCollection without features"));
            Vec::new()
        }
    }
}

fn prop_u64(f: &Value, key: &str) -> Option<u64> {
    f.pointer(&format!("/properties/{key}")).and_then(Value::as_u64)
}

fn prop_f64(f: &Value, key: &str) -> Option<f64> {
    f.pointer(&format!("/properties/{key}")).and_then(Value::as_f64)
}

pub(super) fn parse_buildings(
    text: &str,
    file: &str,
    errors: &mut Vec<String>,
) -> Vec<BuildingInput> {
    let feats = features(text, file, errors);
    let mut out = Vec::with_capacity(feats.len());
    let mut seen_ids = std::collections::HashSet::new();
    for (i, f) in feats.iter().enumerate() {
        let id = feature_id(f, i).unwrap_or(i as u32);
        let what = format!("{file}: building {id}");
        if !seen_ids.insert(id) {
            errors.push(format!("{what}: duplicate id"));
            continue;
        }
        let Some(geometry) = f.get("geometry") else {
            errors.push(format!("{what}: missing geometry"));
            continue;
        };
        let Some(footprint) = parse_polygon(geometry, &what, errors) else {
            continue;
        };

        let floors = prop_u64(f, "floors");
        let apartments = prop_u64(f, "apartments");
        let year = f.pointer("/properties/year").and_then(Value::as_i64);
        let mu_ds = prop_f64(f, "mu_ds");
        let mut ok = true;
        if floors.map_or(true, |v| v < 1) {
            errors.push(format!("{what}: `floors` missing or < 1"));
            ok = false;
        }
        if apartments.map_or(true, |v| v < 1) {
            errors.push(format!("{what}: `apartments` missing or < 1"));
            ok = false;
        }
        if year.map_or(true, |v| v <= 0) {
            errors.push(format!("{what}: `year` missing or non-positive"));
            ok = false;
        }
        if mu_ds.map_or(true, |v| !(0.0..=4.0).contains(&v)) {
            errors.push(format!("{what}: `mu_ds` missing or outside [0, 4]"));
            ok = false;
        }

        let door = match f.pointer("/properties/door") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let pair = v.as_array().and_then(|a| {
                    Some(Point2D::new(a.first()?.as_f64()?, a.get(1)?.as_f64()?))
                });
                if pair.is_none() {
                    errors.push(format!("{what}: `door` must be [x, y]"));
                    ok = false;
                }
                pair
            }
        };
        let door = validate_door(&footprint, door, &what, errors);

        if ok {
            out.push(BuildingInput {
                id,
                footprint,
                floors: floors.unwrap() as u32,
                apartments: apartments.unwrap() as u32,
                year: year.unwrap() as i32,
                mu_ds: mu_ds.unwrap(),
                door,
            });
        }
    }
    out
}

pub(super) fn parse_spaces(text: &str, file: &str, errors: &mut Vec<String>) -> Vec<SpaceInput> {
    let feats = features(text, file, errors);
    let mut out = Vec::with_capacity(feats.len());
    let mut seen_ids = std::collections::HashSet::new();
    for (i, f) in feats.iter().enumerate() {
        let id = feature_id(f, i).unwrap_or(i as u32);
        let what = format!("{file}: open space {id}");
        if !seen_ids.insert(id) {
            errors.push(format!("{what}: duplicate id"));
            continue;
        }
        let Some(geometry) = f.get("geometry") else {
            errors.push(format!("{what}: missing geometry"));
            continue;
        };
        let Some(polygon) = parse_polygon(geometry, &what, errors) else {
            continue;
        };
        let locked = match f.pointer("/properties/locked") {
            None | Some(Value::Null) => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => {
                errors.push(format!("{what}: `locked` must be a boolean"));
                continue;
            }
        };
        out.push(SpaceInput { id, polygon, locked });
    }
    out
}

fn ring_json(ring: &[Point2D], close: bool) -> Value {
    let mut coords: Vec<Value> =
        ring.iter().map(|p| serde_json::json!([p.x, p.y])).collect();
    if close {
        if let Some(first) = ring.first() {
            coords.push(serde_json::json!([first.x, first.y]));
        }
    }
    Value::Array(coords)
}

fn polygon_json(poly: &Polygon2D) -> Value {
    let mut rings = vec![ring_json(poly.exterior(), true)];
    for h in poly.holes() {
        rings.push(ring_json(h, true));
    }
    serde_json::json!({ "type": "Polygon", "coordinates": rings })
}

/// Serialize building records to a GeoJSON string (used by the
/// synthetic-city generator; doors are emitted explicitly).
pub fn buildings_to_geojson(buildings: &[BuildingInput]) -> String {
    let feats: Vec<Value> = buildings
        .iter()
        .map(|b| {
            serde_json::json!({
                "type": "Feature",
                "id": b.id,
                "geometry": polygon_json(&b.footprint),
                "properties": {
                    "floors": b.floors,
                    "apartments": b.apartments,
                    "year": b.year,
                    "mu_ds": b.mu_ds,
                    "door": [b.door.x, b.door.y],
                },
            })
        })
        .collect();
    let fc = serde_json::json!({ "type": "FeatureCollection", "features": feats });
    serde_json::to_string_pretty(&fc).expect("geojson serializes")
}

pub fn spaces_to_geojson(spaces: &[SpaceInput]) -> String {
    let feats: Vec<Value> = spaces
        .iter()
        .map(|s| {
            serde_json::json!({
                "type": "Feature",
                "id": s.id,
                "geometry": polygon_json(&s.polygon),
                "properties": { "locked": s.locked },
            })
        })
        .collect();
    let fc = serde_json::json!({ "type": "FeatureCollection", "features": feats });
    serde_json::to_string_pretty(&fc).expect("geojson serializes")
}
