use super::layout::Layout;
use super::{make_machine, Contract, Driver, Machine, MachineError, MachineKind, RunReport};
use crate::world::{BlockId, Cell, Direction, Kind, WorldConfig};

/// One push of the conveyor: where the mover sits and which way it pushes.
fn conveyor_pushes(n: u32) -> Vec<(Cell, Direction)> {
    let n = n as i32;
    let c = Cell::new;
    if n == 1 {
        return vec![
            (c(-1, 0, 0), Direction::PosX),
            (c(2, 0, 0), Direction::NegX),
        ];
    }
    let mut pushes = Vec::new();
    for k in 0..n {
        pushes.push((c(k - 1, k, 0), Direction::PosX));
        if k < n - 1 {
            pushes.push((c(k + 1, k - 1, 0), Direction::PosY));
        }
    }
    pushes.push((c(n, n - 1, -1), Direction::PosZ));
    for k in (0..n).rev() {
        pushes.push((c(k + 2, k, 1), Direction::NegX));
        if k > 0 {
            pushes.push((c(k, k + 1, 1), Direction::NegY));
        }
    }
    pushes.push((c(0, 0, 2), Direction::NegZ));
    pushes
}

/// Cells the payload occupies, starting at INPUT and after each push.
pub fn conveyor_path(n: u32) -> Vec<Cell> {
    let mut at = Cell::ORIGIN;
    let mut path = vec![at];
    for (_, dir) in conveyor_pushes(n) {
        at = at.step(dir);
        path.push(at);
    }
    path
}

fn phase_schedule(n: u32) -> Vec<u8> {
    if n == 1 {
        vec![0, 5]
    } else {
        (0..conveyor_pushes(n).len())
            .map(|k| (k % 10) as u8)
            .collect()
    }
}

pub(crate) fn conveyor(n: u32) -> Result<Machine, MachineError> {
    if n == 0 {
        return Err(MachineError::Unsupported("conveyor needs n >= 1".into()));
    }
    let mut l = Layout::new();
    l.keep_out(conveyor_path(n));
    for ((at, dir), phase) in conveyor_pushes(n).into_iter().zip(phase_schedule(n)) {
        l.mover(at, dir, phase);
    }
    l.port("INPUT", Cell::ORIGIN, Cell::ORIGIN);
    let pushes = conveyor_pushes(n).len() as u64;
    let cycle = 10 * pushes.div_ceil(10);
    Ok(l.finish(
        MachineKind::Conveyor { n },
        cycle,
        Contract::Oscillate,
        WorldConfig::default(),
    ))
}

/// Runs the conveyor with a free payload at INPUT and reports where the
/// payload sits after every tick.
pub fn run_conveyor(n: u32, cycles: u64) -> Result<(RunReport, Vec<Cell>), MachineError> {
    let m = make_machine(MachineKind::Conveyor { n })?;
    let ticks = cycles * m.cycle_length;
    let mut d = Driver::new(m.instantiate(), ticks);
    let payload = d.stage(&[(m.port("INPUT").lo, Kind::Normal, false)])?[0];
    let mut track = Vec::new();
    for _ in 0..ticks {
        d.tick()?;
        track.push(d.world.block(payload).expect("payload stays").pos);
    }
    let product = track
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    Ok((
        RunReport {
            ticks: d.used,
            product,
            events: d.summary,
        },
        track,
    ))
}

const BELT_LENGTH: i32 = 8;

pub(crate) fn belt() -> Result<Machine, MachineError> {
    let mut l = Layout::new();
    l.mover(Cell::new(-1, 0, 0), Direction::PosX, 0);
    l.normal((-1..=BELT_LENGTH).map(|x| Cell::new(x, 0, -1)));
    l.port("INPUT", Cell::ORIGIN, Cell::ORIGIN);
    l.port(
        "OUTPUT",
        Cell::new(BELT_LENGTH, 0, 0),
        Cell::new(BELT_LENGTH, 0, 0),
    );
    l.keep_out((0..=BELT_LENGTH).map(|x| Cell::new(x, 0, 0)));
    Ok(l.finish(
        MachineKind::Belt,
        10,
        Contract::Fifo,
        WorldConfig::default(),
    ))
}

/// Feeds one labelled item per cycle onto the belt, then unlabelled filler
/// to push the train along, and collects items that reach OUTPUT. Returns
/// the labels in the order they came off.
pub fn run_belt(labels: &str, budget: u64) -> Result<RunReport, MachineError> {
    let m = belt()?;
    let mut d = Driver::new(m.instantiate(), budget);
    let input = m.port("INPUT").lo;
    let output = m.port("OUTPUT").lo;
    let mut pending: Vec<char> = labels.chars().rev().collect();
    let mut on_belt: Vec<(BlockId, Option<char>)> = Vec::new();
    let mut out = String::new();
    while out.chars().count() < labels.chars().count() {
        if d.world.at(input).is_none() {
            let label = pending.pop();
            let id = d.stage(&[(input, Kind::Normal, false)])?[0];
            on_belt.push((id, label));
        }
        for _ in 0..m.cycle_length {
            d.tick()?;
        }
        if let Some(id) = d.world.at(output) {
            let i = on_belt
                .iter()
                .position(|(b, _)| *b == id)
                .expect("only items reach OUTPUT");
            out.extend(on_belt.remove(i).1);
            d.world.remove_block(id)?;
        }
    }
    Ok(RunReport {
        ticks: d.used,
        product: out,
        events: d.summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conveyor_one_goes_right_then_left() {
        let (report, track) = run_conveyor(1, 3).unwrap();
        for (t, c) in track.iter().enumerate() {
            let phase = t % 10;
            let expect = if (0..5).contains(&phase) { 1 } else { 0 };
            assert_eq!(*c, Cell::new(expect, 0, 0), "after tick {t}");
        }
        assert_eq!(report.ticks, 30);
    }

    #[test]
    fn conveyor_n_reaches_n_and_returns() {
        for n in 1..=4u32 {
            let m = make_machine(MachineKind::Conveyor { n }).unwrap();
            let (_, track) = run_conveyor(n, 2).unwrap();
            let max_x = track.iter().map(|c| c.x).max().unwrap();
            assert_eq!(max_x, n as i32);
            let cycle = m.cycle_length as usize;
            assert_eq!(track[cycle - 1], Cell::ORIGIN);
            assert_eq!(track[2 * cycle - 1], Cell::ORIGIN);
            assert_eq!(track[..cycle], track[cycle..]);
        }
    }

    #[test]
    fn path_steps_are_unit_moves() {
        for n in 1..=5 {
            let p = conveyor_path(n);
            assert_eq!(p.first(), p.last());
            assert!(p.windows(2).all(|w| w[0].is_face_adjacent(w[1])));
        }
    }

    #[test]
    fn belt_is_first_in_first_out() {
        let r = run_belt("abcdefghij", 10_000).unwrap();
        assert_eq!(r.product, "abcdefghij");
    }
}
