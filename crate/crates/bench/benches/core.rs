use criterion::{black_box, criterion_group, criterion_main, Criterion};

use finitopos::fincat::FinCategory;
use finitopos::handle::{Budget, ComputationalCategory, HandleFunctor};
use finitopos::kan::{is_flat_bounded, tilde_extend};
use finitopos::presheaf::{
    count_presheaves, enumerate_morphisms, enumerate_presheaves, yoneda_embed,
};
use finitopos::site::{is_sheaf, sheafify};
use finitopos::verify::{fixture_sites, opens2};

fn enumeration(c: &mut Criterion) {
    let chain4 = FinCategory::chain(4);
    let o2 = opens2();
    c.bench_function("enumerate presheaves chain4 <= 3", |b| {
        b.iter(|| {
            enumerate_presheaves(black_box(&chain4), 3, 1 << 17)
                .unwrap()
                .len()
        })
    });
    c.bench_function("count presheaves opens2 <= 3", |b| {
        b.iter(|| count_presheaves(black_box(&o2), 3))
    });
    let ps = enumerate_presheaves(&o2, 2, 1 << 17).unwrap();
    let h = yoneda_embed(&o2, o2.object_id("ab").unwrap()).unwrap();
    c.bench_function("Nat(h_ab, F) over opens2 <= 2", |b| {
        b.iter(|| {
            ps.iter()
                .map(|f| enumerate_morphisms(&h, f, 1 << 16).unwrap().len())
                .sum::<usize>()
        })
    });
}

fn sheaves(c: &mut Criterion) {
    let site = fixture_sites()
        .into_iter()
        .find(|s| s.name() == "opens2")
        .unwrap();
    let ps = enumerate_presheaves(site.base(), 2, 1 << 17).unwrap();
    c.bench_function("is_sheaf opens2 all <= 2", |b| {
        b.iter(|| {
            ps.iter()
                .filter(|f| is_sheaf(f, &site).unwrap().holds)
                .count()
        })
    });
    c.bench_function("sheafify opens2 all <= 2", |b| {
        b.iter(|| {
            ps.iter()
                .map(|f| sheafify(f, &site).unwrap().sheaf.total_size())
                .sum::<usize>()
        })
    });
}

fn extension(c: &mut Criterion) {
    let arrow = FinCategory::walking_arrow();
    let psh = ComputationalCategory::presheaf_category(&arrow, 3, Budget::DEFAULT).unwrap();
    let y = HandleFunctor::yoneda(&psh).unwrap();
    let inputs = enumerate_presheaves(&arrow, 3, 1 << 17).unwrap();
    c.bench_function("tilde_extend yoneda on 2 <= 3", |b| {
        b.iter(|| {
            inputs
                .iter()
                .map(|h| tilde_extend(&y, h).unwrap().apex.total_size())
                .sum::<usize>()
        })
    });
    let chain3 = FinCategory::chain(3);
    let finset = ComputationalCategory::finset(3, Budget::DEFAULT).unwrap();
    let p = HandleFunctor::set_valued(
        "from_1",
        &chain3,
        &finset,
        &[("0", &[]), ("1", &["*"]), ("2", &["*"])],
        &[("1<=2", &[("*", "*")])],
    )
    .unwrap();
    c.bench_function("is_flat_bounded chain3 representable", |b| {
        b.iter(|| {
            is_flat_bounded(black_box(&p), &Budget::SMALL)
                .unwrap()
                .checks()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = enumeration, sheaves, extension
}
criterion_main!(benches);
