//! End-to-end engine checks against independent oracles, plus CLI contract
//! tests (exit codes, CSV shape, row order).

mod common;

use bwar::config::{SimConfig, Variant};
use bwar::engine::run;
use bwar::rng::{stream, uniform_f64, STREAM_ARRIVALS};

use std::collections::VecDeque;
use std::process::Command;

/// Hand-rolled two-node chain: one cell, nodes 0 and 1 destined to each
/// other, destination-advantage service. Written without the engine's
/// machinery — plain FIFO queues and the same arrival stream contract (one
/// uniform draw per node per slot, slot phases service-then-arrivals,
/// occupancy sampled at the slot boundary).
struct TwoNodeHandSim {
    q0: VecDeque<u64>, // admit times of packets at node 0 (for node 1)
    q1: VecDeque<u64>,
    admitted: u64,
    delivered: u64,
    transmissions: u64,
    delay_sum: u64,
    sum_q: u128,
}

fn two_node_hand_sim(lambda: f64, slots: u64, seed: u64) -> TwoNodeHandSim {
    let mut s = TwoNodeHandSim {
        q0: VecDeque::new(),
        q1: VecDeque::new(),
        admitted: 0,
        delivered: 0,
        transmissions: 0,
        delay_sum: 0,
        sum_q: 0,
    };
    let mut arrivals = stream(seed, STREAM_ARRIVALS);
    for t in 0..slots {
        // service: the longer queue transmits to its destination; ties give
        // node 0 the slot (lowest sender id wins ties)
        let (l0, l1) = (s.q0.len(), s.q1.len());
        if l0 >= l1 && l0 > 0 {
            let admit = s.q0.pop_front().unwrap();
            s.transmissions += 1;
            s.delivered += 1;
            s.delay_sum += t - admit;
        } else if l1 > 0 {
            let admit = s.q1.pop_front().unwrap();
            s.transmissions += 1;
            s.delivered += 1;
            s.delay_sum += t - admit;
        }
        // arrivals: node order, one draw each, every slot
        if uniform_f64(&mut arrivals) < lambda {
            s.q0.push_back(t);
            s.admitted += 1;
        }
        if uniform_f64(&mut arrivals) < lambda {
            s.q1.push_back(t);
            s.admitted += 1;
        }
        s.sum_q += (s.q0.len() + s.q1.len()) as u128;
    }
    s
}

fn two_node_cfg(lambda: f64, slots: u64, seed: u64) -> SimConfig {
    let mut cfg = SimConfig::new(Variant::RbDa, 1, 2, lambda);
    cfg.slots = slots;
    cfg.seed = seed;
    cfg
}

#[test]
fn two_node_chain_matches_hand_simulation() {
    for (lambda, slots, seed) in [(0.3, 20_000, 5), (1.0, 5_000, 9), (0.45, 10_000, 123)] {
        let hand = two_node_hand_sim(lambda, slots, seed);
        let engine = run(two_node_cfg(lambda, slots, seed)).unwrap();
        assert_eq!(engine.admitted, hand.admitted, "admits diverged at lambda={lambda}");
        assert_eq!(engine.delivered, hand.delivered, "deliveries diverged at lambda={lambda}");
        assert_eq!(engine.transmissions, hand.transmissions);
        assert_eq!(engine.duplicate_transmissions, 0);
        let hand_delay = hand.delay_sum as f64 / hand.delivered as f64;
        let engine_delay = engine.mean_delay.expect("both sims delivered packets");
        assert!(
            (engine_delay - hand_delay).abs() < 1e-9,
            "delay diverged: engine {engine_delay} vs hand {hand_delay}"
        );
        let hand_mean_q = hand.sum_q as f64 / slots as f64;
        assert!((engine.mean_q - hand_mean_q).abs() < 1e-9);
    }
}

#[test]
fn two_node_low_load_delay_is_one_slot() {
    // At light load the pair meets every slot, so nearly every packet goes
    // out on the slot after it arrives.
    let r = run(two_node_cfg(0.05, 50_000, 7)).unwrap();
    let d = r.mean_delay.unwrap();
    assert!(d >= 1.0 && d < 1.2, "unexpected two-node delay {d}");
    assert!(r.stable);
}

#[test]
fn stable_runs_deliver_nearly_everything() {
    // well below the saturation point of the 16-node, 9-cell network
    for v in Variant::ALL {
        let mut cfg = SimConfig::new(v, 9, 16, 0.05);
        cfg.slots = 100_000;
        cfg.seed = 3;
        let r = run(cfg).unwrap();
        assert!(r.stable, "{v} should be stable at this load");
        let ratio = r.delivered as f64 / r.admitted as f64;
        assert!(ratio >= 0.95, "{v} delivery ratio {ratio}");
        assert!(r.mean_u <= r.mean_q + 1e-9, "{v} undelivered exceeds backlog");
    }
}

#[test]
fn scheduler_matches_oracle_on_spot_instances() {
    // a quick cross-check here; the exhaustive randomized sweep lives in
    // the acceptance suite
    let mut rng = common::seeded(0xBEEF);
    for case in 0..500 {
        for (variant, dups) in
            [(Variant::Rb, false), (Variant::RbDa, false), (Variant::BwarId, true)]
        {
            let inst = common::random_instance(&mut rng, dups);
            let got = common::production_select(variant, &inst);
            let want = common::oracle_select(variant, &inst);
            assert_eq!(got, want, "case {case} {variant}: {inst:?}");
        }
    }
}

// ---- CLI contract ----------------------------------------------------------

fn bwar_cmd(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bwar"))
        .args(args)
        .output()
        .expect("spawn bwar binary")
}

#[test]
fn cli_success_writes_csv_to_stdout() {
    let out = bwar_cmd(&[
        "--variant", "RB", "--cells", "9", "--nodes", "16", "--lambda", "0.02", "--slots", "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("experiment,variant,C,N,lambda,"));
    assert!(lines[1].starts_with("custom,RB,9,16,"));
}

#[test]
fn cli_seed_rows_are_ordered() {
    let out = bwar_cmd(&[
        "--variant", "BWAR-IM", "--cells", "9", "--nodes", "16", "--lambda", "0.02",
        "--slots", "2000", "--seed", "7", "--seeds", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let seeds: Vec<&str> =
        text.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(seeds, ["7", "8", "9"]);
}

#[test]
fn cli_preset_expands_rows() {
    let out = bwar_cmd(&["--preset", "fig5", "--slots", "300", "--seeds", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 20 * 2);
    assert!(text.lines().nth(1).unwrap().starts_with("fig5,"));
}

#[test]
fn cli_usage_errors_exit_2() {
    for args in [
        &["--variant", "RB", "--lambda", "1.5"] as &[&str],
        &["--variant", "NOPE"],
        &["--preset", "fig9"],
        &["--preset", "fig3", "--variant", "RB"],
        &[],
        &["--variant", "RB", "--nodes", "15"],
    ] {
        let out = bwar_cmd(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?} should explain themselves");
    }
}

#[test]
fn cli_io_error_exits_1() {
    let out = bwar_cmd(&[
        "--variant", "RB", "--cells", "9", "--nodes", "16", "--slots", "200",
        "--out", "/nonexistent-dir/run.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("/nonexistent-dir/run.csv"), "stderr lacks path context: {msg}");
}

#[test]
fn cli_help_exits_0() {
    let out = bwar_cmd(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn cli_output_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = bwar_cmd(&[
        "--variant", "SNW", "--cells", "9", "--nodes", "16", "--lambda", "0.01",
        "--slots", "2000", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert_eq!(body.lines().count(), 2);
    assert!(body.lines().nth(1).unwrap().contains(",SNW,"));
}
