//! Plain-text floorplan snapshots, one record per line:
//! `room min_x max_x min_z max_z`, `portal a b axis start end`,
//! `entity kind color x z`.

use super::entity::{Entity3D, EntityKind};
use super::plan::FloorPlan;
use crate::grid::Color;

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn to_text(plan: &FloorPlan) -> String {
    let mut out = String::new();
    for r in plan.rooms() {
        out += &format!("room {} {} {} {}\n", num(r.min_x), num(r.max_x), num(r.min_z), num(r.max_z));
    }
    for p in plan.portals() {
        out += &format!("portal {} {} {} {} {}\n", p.room_a, p.room_b, p.axis.name(), num(p.start), num(p.end));
    }
    for e in &plan.entities {
        out += &format!("entity {} {} {} {}\n", e.kind.name(), e.color.name(), num(e.x), num(e.z));
    }
    out
}

/// Rebuilds a plan from [`to_text`] output. Entity positions keep the
/// snapshot's four-decimal precision.
pub fn from_text(text: &str) -> Result<FloorPlan, String> {
    let mut plan = FloorPlan::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || format!("line {}: {line:?}", n + 1);
        let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
        match f.as_slice() {
            ["room", a, b, c, d] => {
                plan.add_rect_room(real(a)?, real(b)?, real(c)?, real(d)?).map_err(|e| format!("{}: {e}", bad()))?;
            }
            ["portal", a, b, _axis, s, e] => {
                let a = a.parse().map_err(|_| bad())?;
                let b = b.parse().map_err(|_| bad())?;
                plan.connect_rooms(a, b, (real(s)?, real(e)?)).map_err(|e| format!("{}: {e}", bad()))?;
            }
            ["entity", kind, color, x, z] => {
                let kind = EntityKind::from_name(kind).ok_or_else(bad)?;
                let color = Color::from_name(color).ok_or_else(bad)?;
                let (radius, height) = kind.dims();
                let id = plan.next_entity_id;
                plan.next_entity_id += 1;
                plan.entities.push(Entity3D { id, kind, color, x: real(x)?, z: real(z)?, radius, height });
            }
            _ => return Err(bad()),
        }
    }
    Ok(plan)
}
