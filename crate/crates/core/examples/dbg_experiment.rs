use psewer_core::*;

fn run_suite(label: &str, tweak: impl Fn(&mut SimConfig<f64>)) {
    println!("=== {label}");
    for seed in [1u64, 2, 3, 4, 5] {
        let mut stds = Vec::new();
        for set in EXPERIMENT_SETS {
            let mut cfg = SimConfig::<f64>::defaults(12, 10, seed).unwrap().with_modules(set);
            tweak(&mut cfg);
            let result = run_simulation(cfg).unwrap();
            let ms = moving_sum(&result.aggregate_outflow, 7200, 10).unwrap();
            let stats = summary_stats(&ms.values).unwrap();
            stds.push((set.label(), stats.std, result.overflow_events.len()));
        }
        let std_a = stds[0].1;
        print!("seed {seed}: ");
        for (l, s, ovf) in &stds {
            print!("{l}={s:.4} ({:.0}%{}) ", (std_a - s) / std_a * 100.0, if *ovf > 0 { " OVF!" } else { "" });
        }
        // margins
        let ab = stds[1].1; let abd = stds[2].1; let abc = stds[3].1; let abcd = stds[4].1;
        println!("| AB<A:{} ABD<=.95AB:{} ABCD<=.95ABC:{}",
            ab < 0.95 * std_a, abd <= 0.95 * ab, abcd <= 0.95 * abc);
    }
}

fn main() {
    run_suite("defaults (learn_low = low_stop = 0.10)", |_| {});
    run_suite("learn_low 0.08 < low_stop 0.10", |cfg| {
        cfg.tank.learn_low = 0.08;
    });
}
