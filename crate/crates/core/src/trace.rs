//! Text frames of a running world.
//!
//! A frame is `# tick=N`, then for every occupied plane `# z=K` and the rows
//! of that plane as three-character tokens over the world's x/y bounding box.
//! An expanded mover's head shows as `h` plus its direction digit. Events of
//! the tick follow as tab-separated lines.

use std::fmt::Write as _;

use crate::engine::Event;
use crate::world::{Cell, World};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub tick: u64,
    pub dump: String,
    pub events: Vec<Event>,
}

impl Frame {
    pub fn capture(world: &World, tick: u64, events: Vec<Event>) -> Frame {
        Frame {
            tick,
            dump: render_planes(world),
            events,
        }
    }

    pub fn write_to(&self, out: &mut String) {
        let _ = writeln!(out, "# tick={}", self.tick);
        out.push_str(&self.dump);
        for e in &self.events {
            let _ = writeln!(out, "{e}");
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub frames: Vec<Frame>,
}

impl Trace {
    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.frames.iter().flat_map(|f| f.events.iter())
    }

    /// Full trace file text: `header` line (if any) and then every frame.
    pub fn to_text(&self, header: &str) -> String {
        let mut out = String::new();
        if !header.is_empty() {
            out.push_str(header);
            out.push('\n');
        }
        for f in &self.frames {
            f.write_to(&mut out);
        }
        out
    }
}

fn token_at(world: &World, c: Cell) -> String {
    let Some(id) = world.at(c) else {
        return "___".to_string();
    };
    let b = world.block(id).expect("occupant is live");
    if b.pos == c {
        b.kind.token()
    } else {
        let dir = match b.kind {
            crate::world::Kind::Mover { dir, .. } => dir.code(),
            _ => 0,
        };
        format!("h{dir}_")
    }
}

/// Plane-by-plane dump of every occupied z level.
pub fn render_planes(world: &World) -> String {
    let mut out = String::new();
    let Some((lo, hi)) = world.bounds() else {
        return out;
    };
    let mut planes: Vec<i32> = world.occupied_cells().map(|(c, _)| c.z).collect();
    planes.sort_unstable();
    planes.dedup();
    for z in planes {
        let _ = writeln!(out, "# z={z}");
        for y in lo.y..=hi.y {
            for x in lo.x..=hi.x {
                out.push_str(&token_at(world, Cell::new(x, y, z)));
            }
            out.push('\n');
        }
    }
    out
}

/// A single tick-0 frame, as printed by `render`.
pub fn render_frame(world: &World) -> String {
    let mut out = String::new();
    Frame::capture(world, world.tick, Vec::new()).write_to(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{Direction, Kind};

    #[test]
    fn one_block_frame() {
        let mut w = World::default();
        w.add_block(Kind::Normal, Cell::ORIGIN).unwrap();
        assert_eq!(render_frame(&w), "# tick=0\n# z=0\nb__\n");
    }

    #[test]
    fn expanded_head_is_marked() {
        let mut w = World::default();
        w.add_block(
            Kind::Mover {
                dir: Direction::PosX,
                phase: 0,
            },
            Cell::ORIGIN,
        )
        .unwrap();
        crate::engine::step(&mut w);
        assert_eq!(render_planes(&w), "# z=0\nM00h0_\n");
    }
}
