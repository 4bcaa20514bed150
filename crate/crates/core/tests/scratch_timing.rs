mod common;
use common::*;
use std::time::Instant;
use treelip::{lip_norm, Scalar, SelfMap, TreeModel};

#[test]
fn timing_probe() {
    let map = SelfMap::affine_path(2, 1, false).unwrap();
    let depth = 4096u64;

    let t0 = Instant::now();
    let trunc = map.tree().truncation(depth, &budget()).unwrap();
    let t1 = Instant::now();
    let mut count = 0u64;
    for v in trunc.vertices() {
        let image = map.image(v).unwrap();
        count += image.length();
    }
    let t2 = Instant::now();
    println!("truncation: {:?}", t1 - t0);
    println!("image loop: {:?} ({count})", t2 - t1);

    let tree = TreeModel::path();
    let lam = Scalar::from_ratio(3, 2);
    let mu = lam.to_complex64().norm().ln() / 2f64.ln();
    let g = treelip::TreeFunction::new("probe", treelip::SupportHint::None, move |v| {
        let ln_n = ((v.length() + 1) as f64).ln();
        Scalar::from_f64((mu * ln_n).exp())
    });
    let t3 = Instant::now();
    let norm2 = lip_norm(&g, &tree, depth, &budget()).unwrap();
    let t4 = Instant::now();
    println!("lip_norm float fn: {:?} ({:?})", t4 - t3, norm2.value.approx());

    let lambda = Scalar::exact(int(1), ratio(1, 2));
    let t5 = Instant::now();
    let mut residual = 0f64;
    for v in trunc.vertices() {
        let image = map.image(v).unwrap();
        let diff = (g.eval(&image) - lambda.clone() * g.eval(v)).modulus();
        residual = residual.max(diff.approx());
    }
    let t6 = Instant::now();
    println!("residual mixed lambda: {:?} ({residual})", t6 - t5);
}
