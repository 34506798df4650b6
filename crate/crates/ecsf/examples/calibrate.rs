//! Scratch calibration harness (temporary).

use ecsf::blowup;
use ecsf::flow::{self, FlowConfig};
use ecsf::monitors;
use ecsf::seeds;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "whitney50".into());
    match which.as_str() {
        "whitney50" => whitney50(),
        "circle" => circle(),
        "blowup" => blowup_run(),
        "windows" => windows(),
        _ => eprintln!("unknown mode"),
    }
}

fn windows() {
    let t0 = Instant::now();
    let seed = seeds::whitney_lobe(2, 1024).unwrap();
    let cfg = FlowConfig {
        a_stop_factor: 4e4,
        cfl: 0.4,
        ..FlowConfig::default()
    };
    let h = flow::run(&seed, &cfg).unwrap();
    println!(
        "deep run: {} steps, {:?}, elapsed {:.2?}",
        h.series.len() - 1,
        h.termination,
        t0.elapsed()
    );
    for w in [20.0, 12.0, 8.0, 6.0, 4.0] {
        let frames =
            blowup::capture_frames(&h, h.initial_max_k, std::f64::consts::SQRT_2, w).unwrap();
        let ind = blowup::type_indicator(&h, &frames);
        let dist = blowup::intersection_distance(&frames);
        let tail: Vec<String> = frames
            .iter()
            .rev()
            .take(6)
            .map(|f| {
                let fit = blowup::reaper_fit(f).unwrap();
                format!("{:.4}/{:.3}", fit.residual, fit.speed)
            })
            .collect();
        let delta_max = ind.delta.iter().cloned().fold(0.0f64, f64::max);
        println!(
            "W={w:5.1}: frames {}, delta first {:.3} max {:.3} (x{:.2}), r_j {:.2}->{:.2} (x{:.2}), last fits res/c: {}",
            frames.len(),
            ind.delta.first().unwrap(),
            delta_max,
            delta_max / ind.delta.first().unwrap(),
            dist.r_j.first().unwrap(),
            dist.r_j.last().unwrap(),
            dist.growth,
            tail.join(" ")
        );
    }
}

fn whitney50() {
    let t0 = Instant::now();
    let seed = seeds::whitney_lobe(2, 1024).unwrap();
    let cfg = FlowConfig {
        a_stop_factor: 50.0,
        ..FlowConfig::default()
    };
    let h = flow::run(&seed, &cfg).unwrap();
    println!(
        "whitney50: {} steps, t_final = {:.6e}, termination {:?}, elapsed {:.2?}",
        h.series.len() - 1,
        h.t_final(),
        h.termination,
        t0.elapsed()
    );
    println!(
        "  initial max_a {:.4}, final max_a {:.4}, final nodes {}",
        h.initial_max_a,
        h.series.last().unwrap().max_a,
        h.final_curve().node_count()
    );
    let s0 = &h.series[0];
    println!(
        "  initial: phi {:.8} area {:.8} i_kp {:.8} min p/r {:.6} min q {:.6} c0 {:.6} c_pi {:.6}",
        s0.phi_l, s0.area, s0.i_kp, s0.min_p_over_r, s0.min_kp_over_r, s0.c0, s0.c_pi
    );
    // Worst monotonicity drop.
    let mut run_max = f64::NEG_INFINITY;
    let mut worst_drop = 0.0f64;
    for s in &h.series {
        run_max = run_max.max(s.min_p_over_r);
        worst_drop = worst_drop.max(run_max - s.min_p_over_r);
    }
    println!("  min p/r: init {:.6}, worst drop {:.3e}", s0.min_p_over_r, worst_drop);
    let min_q = h.series.iter().map(|s| s.min_kp_over_r).fold(f64::INFINITY, f64::min);
    println!("  min (k-p)/r over run: {:.6}", min_q);
    // i_kp drift up to 20x.
    let mut worst_drift = 0.0f64;
    let mut running = 0.0f64;
    for s in &h.series {
        running = running.max(s.max_a);
        if running > 20.0 * h.initial_max_a {
            break;
        }
        worst_drift = worst_drift.max((s.i_kp - s0.i_kp).abs());
    }
    println!("  i_kp drift to 20x: {:.3e} (rel {:.3e})", worst_drift, worst_drift / s0.i_kp);
    // Worst phi rise.
    let mut worst_rise = f64::NEG_INFINITY;
    for w in h.series.windows(2) {
        worst_rise = worst_rise.max(w[1].phi_l - w[0].phi_l);
    }
    println!("  worst phi rise per step: {:.3e}", worst_rise);
    // Residual stats.
    let worst_res = h
        .series
        .iter()
        .take_while(|s| s.t <= 0.99 * h.t_final())
        .skip(3)
        .filter_map(|s| s.evo_residual)
        .fold(0.0f64, f64::max);
    println!("  worst evo residual (to 99% of life): {:.3e}", worst_res);
    let report = monitors::check_history(&h);
    print!("{}", ecsf::io::report_txt(&report));
}

fn circle() {
    for m in [2u32, 3] {
        let t0 = Instant::now();
        let seed = seeds::circle_loop(m, 512, 1.0).unwrap();
        let cfg = FlowConfig {
            a_stop_factor: 4.3,
            ..FlowConfig::default()
        };
        let h = flow::run(&seed, &cfg).unwrap();
        println!(
            "circle m={m}: {} steps, t_final {:.8}, exact T = {:.8}, elapsed {:.2?}",
            h.series.len() - 1,
            h.t_final(),
            1.0 / (2.0 * m as f64),
            t0.elapsed()
        );
        // R_numeric vs closed form along the way.
        let mut worst_rel = 0.0f64;
        for s in &h.series {
            let r_exact = (1.0 - 2.0 * m as f64 * s.t).sqrt();
            if r_exact < 0.25 {
                break;
            }
            // max_k = 1/R on circles.
            let r_num = 1.0 / s.max_k;
            worst_rel = worst_rel.max((r_num / r_exact - 1.0).abs());
        }
        println!("  worst relative radius error to R0/4: {:.3e}", worst_rel);
        let t_hat = blowup::estimate_blowup_time(&h);
        println!("  estimated blow-up time: {:?}", t_hat);
        let frames = blowup::capture_frames(&h, 1.3 * h.initial_max_k, 1.25, 20.0).unwrap();
        let ind = blowup::type_indicator(&h, &frames);
        println!(
            "  frames {}, delta = {:?}, expected {:.4}",
            frames.len(),
            ind.delta,
            1.0 / (2.0 * m as f64)
        );
    }
}

fn blowup_run() {
    let n: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1024);
    let a_stop: f64 = std::env::args()
        .nth(3)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000.0);
    let max_nodes: usize = std::env::args()
        .nth(4)
        .and_then(|s| s.parse().ok())
        .unwrap_or(16384);
    let cfl: f64 = std::env::args()
        .nth(5)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.25);
    let a0_factor: f64 = std::env::args()
        .nth(6)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10.0);
    let t0 = Instant::now();
    let seed = seeds::whitney_lobe(2, n).unwrap();
    let cfg = FlowConfig {
        a_stop_factor: a_stop,
        max_nodes,
        cfl,
        ..FlowConfig::default()
    };
    let h = flow::run(&seed, &cfg).unwrap();
    println!(
        "blowup run N={n} a_stop={a_stop} max_nodes={max_nodes}: {} steps, t_final {:.8}, {:?}, elapsed {:.2?}, final nodes {}",
        h.series.len() - 1,
        h.t_final(),
        h.termination,
        t0.elapsed(),
        h.final_curve().node_count()
    );
    println!("  snapshots: {}", h.snapshots.len());
    let frames = match blowup::capture_frames(&h, a0_factor * h.initial_max_k, std::f64::consts::SQRT_2, 20.0) {
        Ok(f) => f,
        Err(e) => {
            println!("  capture failed: {e}");
            return;
        }
    };
    let ind = blowup::type_indicator(&h, &frames);
    let dist = blowup::intersection_distance(&frames);
    println!("  t_hat = {:?}", ind.t_hat);
    println!("  frames: {}", frames.len());
    for (i, f) in frames.iter().enumerate() {
        let fit = blowup::reaper_fit(f);
        let ray = blowup::ray_test(f);
        match (fit, ray) {
            (Ok(fit), Ok(ray)) => println!(
                "   j={:2} a={:9.2} t={:.8} r_j={:8.3} delta={:7.3} res={:9.3e} theta={:7.2} c={:7.4} resol={:6.3} nodes={} opening={:8.5}",
                f.j, f.a, f.t, f.r_j,
                ind.delta.get(i).copied().unwrap_or(f64::NAN),
                fit.residual, fit.theta.to_degrees(), fit.speed, f.resolution, f.nodes.len(),
                ray.opening_integral,
            ),
            _ => println!("   j={:2} fit failed", f.j),
        }
    }
    println!(
        "  delta growth {:.2}, r_j growth {:.2}, type_ii {:?}, unbounded {:?}",
        ind.growth, dist.growth, ind.type_ii, dist.unbounded_trend
    );
}
