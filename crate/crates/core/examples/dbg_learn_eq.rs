use psewer_core::*;

fn main() {
    let n = 12usize;
    let scales: Vec<f64> = (0..n).map(|k| 1.0 + k as f64 / 11.0).collect();
    let schedule = build_schedule(n, 600, 0, 1).unwrap();
    assert_eq!(schedule.regular_slots_per_day(), 144);
    let tank = TankParams {
        capacity: 1.0,
        dead_volume: 0.05,
        learn_low: 0.10,
        learn_high: 0.30,
        warn_level: 0.32,
        high_start: 0.45,
        low_stop: 0.12,
        pump_rate: 9.0e-4,
    };
    let mut profile = InflowProfile::constant(0.54);
    profile.unit_scales = UnitScales::Explicit(scales.clone());
    let cfg = SimConfig {
        n_units: n,
        horizon_days: 10,
        dt: 10,
        seed: 1,
        tank,
        tank_overrides: vec![],
        init_volume: Some(0.20),
        profile,
        control: ControlConfig {
            modules: ModuleSet::parse("ABD").unwrap(),
            base_pump_time: 50.0,
            learn_step: 20.0,
            schedule,
        },
        unit_stream_seeds: None,
    };
    let result = run_simulation(cfg).unwrap();
    let day5 = 5 * 86400u64;
    let end = 10 * 86400u64;
    let mut worst = 0.0f64;
    for k in 0..n {
        let slots = result.config.control.schedule.regular_slots_of(k) as f64;
        let target = 0.54 * scales[k] / (9.0e-4 * slots) - 50.0;
        // every offset in force during [day5, end]
        let mut offsets = vec![result.offset_at(k, day5)];
        offsets.extend(
            result.learning_trace.iter()
                .filter(|s| s.unit == k && s.t > day5 && s.t <= end)
                .map(|s| s.offset),
        );
        let dev = offsets.iter().map(|o| (o - target).abs()).fold(0.0, f64::max);
        worst = worst.max(dev);
        println!("unit {k:2}: scale {:.3} target {:+6.2} offsets_after_day5 {:?} max|dev| {:.1}",
            scales[k], target, offsets, dev);
    }
    println!("worst deviation: {worst:.2} (limit 20)");
    println!("failsafe events: {}", result.events.iter().filter(|e| e.source == CommandSource::FailSafe).count());
}
