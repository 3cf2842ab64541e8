use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use uctkit::fg::{ext_group, hom_group, smith_normal_form};
use uctkit::tower::{lim1, pext, DEFAULT_WINDOW};
use uctkit::uct::{finite_model_check, kk_filtration_diagram};
use uctkit::{DirectTower, FgGroup, GroupExpr, IntMatrix, InverseTower, KTheoryData};

/// Deterministic dense matrix with entries in -50..50.
fn dense(n: usize) -> IntMatrix {
    let mut x = 0x2545_f491_u64;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    (x % 100) as i64 - 50
                })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(&rows)
}

fn snf(c: &mut Criterion) {
    let mut g = c.benchmark_group("smith_normal_form");
    for n in [4, 8, 16] {
        let m = dense(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| smith_normal_form(black_box(m))));
    }
    g.finish();
}

fn functors(c: &mut Criterion) {
    let g = FgGroup::from_cyclic_orders([4, 12, 36]);
    let h = FgGroup::from_cyclic_orders([6, 18, 0]);
    c.bench_function("hom_group", |b| b.iter(|| hom_group(black_box(&g), black_box(&h))));
    c.bench_function("ext_group", |b| b.iter(|| ext_group(black_box(&g), black_box(&h))));
}

fn towers(c: &mut Criterion) {
    let mut g = c.benchmark_group("pext_prufer_against_cyclic_sum");
    for p in [2, 3] {
        let t = DirectTower::prufer(p).unwrap();
        let h = GroupExpr::inf_sum(p, 1, 0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(p), &(t, h), |b, (t, h)| {
            b.iter(|| pext(black_box(t), black_box(h), DEFAULT_WINDOW).unwrap())
        });
    }
    g.finish();
    let t = InverseTower::ext(&DirectTower::elementary(2, 1).unwrap(), &GroupExpr::z());
    c.bench_function("lim1_elementary_ext", |b| b.iter(|| lim1(black_box(&t), DEFAULT_WINDOW)));
}

fn diagrams(c: &mut Criterion) {
    let finite = KTheoryData::new(
        DirectTower::explicit(
            vec![FgGroup::cyclic(2), FgGroup::cyclic(4)],
            vec![uctkit::FgHom::new(FgGroup::cyclic(2), FgGroup::cyclic(4), IntMatrix::from_rows(&[[2]])).unwrap()],
        )
        .unwrap(),
        DirectTower::stable(FgGroup::cyclic(2)),
        "Z/4".parse().unwrap(),
        "Z/2".parse().unwrap(),
    );
    c.bench_function("finite_model_check", |b| b.iter(|| finite_model_check(black_box(&finite), 0).unwrap()));
    let example = KTheoryData::new(
        DirectTower::prufer(3).unwrap(),
        DirectTower::stable(FgGroup::trivial()),
        GroupExpr::zero(),
        GroupExpr::inf_sum(3, 1, 0).unwrap(),
    );
    c.bench_function("kk_filtration_diagram_prufer", |b| {
        b.iter(|| kk_filtration_diagram(black_box(&example), 0, DEFAULT_WINDOW).unwrap())
    });
}

criterion_group!(benches, snf, functors, towers, diagrams);
criterion_main!(benches);
