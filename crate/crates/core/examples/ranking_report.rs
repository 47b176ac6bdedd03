//! Prints per-seed ARI rankings of every method on the bundled presets.

use fourtastic::clustering::Linkage;
use fourtastic::datagen::{generate, preset, preset_names};
use fourtastic::dissimilarity::{default_alpha, Measure};
use fourtastic::evaluation::{compare_methods, Method};
use fourtastic::params::TravelParams;

fn main() {
    let methods = [
        Method::KMeans,
        Method::Hierarchical(Measure::Tastic),
        Method::Hierarchical(Measure::Euclidean),
        Method::Hierarchical(Measure::EuclideanTimeTravel),
        Method::Hierarchical(Measure::Pearson),
        Method::Hierarchical(Measure::PearsonTimeTravel),
        Method::Hierarchical(Measure::PearsonTimeTrendTravel),
    ];
    let only: Vec<String> = std::env::args().skip(1).collect();
    for name in preset_names() {
        if !only.is_empty() && !only.iter().any(|o| o == name) {
            continue;
        }
        println!("== {name}");
        let mut sums = vec![0.0f64; methods.len()];
        for seed in 0..10u64 {
            let spec = preset(name, 100 + seed).unwrap();
            let (data, truth) = generate(&spec).unwrap();
            let alpha = default_alpha(&data, 0.09).unwrap();
            let params = TravelParams::preset(alpha).unwrap();
            let scores =
                compare_methods(&data, &truth, &methods, &params, Linkage::Average, 100 + seed, 5)
                    .unwrap();
            print!("  seed {seed:2} alpha {alpha:.4}");
            for (i, s) in scores.iter().enumerate() {
                sums[i] += s.ari;
                print!("  {} {:.3}", s.method, s.ari);
            }
            println!();
        }
        print!("  MEANS        ");
        for (i, m) in methods.iter().enumerate() {
            print!("  {} {:.3}", m.name(), sums[i] / 10.0);
        }
        println!();
    }
}
