use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use replikit::engine::run_quiet;
use replikit::turing::{library, run_stateless, to_stateless};
use replikit::{par, Cell, Direction, Kind, World, WorldConfig};

fn random_world(seed: u64) -> World {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut world = World::new(WorldConfig::default());
    for _ in 0..60 {
        let pos = Cell::new(
            rng.gen_range(0..12),
            rng.gen_range(0..12),
            rng.gen_range(0..3),
        );
        let kind = match rng.gen_range(0..3) {
            0 => Kind::Normal,
            1 => Kind::Mover {
                dir: Direction::ALL[rng.gen_range(0..6)],
                phase: rng.gen_range(0..10),
            },
            _ => Kind::Gluer {
                dir: Direction::ALL[rng.gen_range(0..6)],
                mode: replikit::GluerMode::Glue,
            },
        };
        let _ = world.add_block(kind, pos);
    }
    world
}

fn simulate(seed: &u64) -> usize {
    let mut w = random_world(*seed);
    run_quiet(&mut w, 50);
    w.bond_count()
}

fn bench_worlds(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..64).collect();
    let mut g = c.benchmark_group("worlds");
    g.bench_with_input(BenchmarkId::new("parallel", seeds.len()), &seeds, |b, s| {
        b.iter(|| black_box(par::map(s, simulate)))
    });
    g.bench_with_input(
        BenchmarkId::new("sequential", seeds.len()),
        &seeds,
        |b, s| b.iter(|| black_box(par::map_sequential(s, simulate))),
    );
    g.finish();
}

fn bench_tapes(c: &mut Criterion) {
    let table = to_stateless(&library::incrementer()).expect("single-character states");
    let tapes: Vec<String> = (0..256u32).map(|v| format!("#{v:08b}#")).collect();
    let run = |t: &String| {
        run_stateless(&table, t, 'R', 1, 1000)
            .expect("halts")
            .output()
    };
    let mut g = c.benchmark_group("stateless_incrementer");
    g.bench_function("parallel", |b| b.iter(|| black_box(par::map(&tapes, run))));
    g.bench_function("sequential", |b| {
        b.iter(|| black_box(par::map_sequential(&tapes, run)))
    });
    g.finish();
}

criterion_group!(benches, bench_worlds, bench_tapes);
criterion_main!(benches);
