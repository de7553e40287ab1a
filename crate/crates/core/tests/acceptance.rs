//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance`.

mod common;

use std::collections::HashMap;
use std::num::NonZeroU32;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use balancedn::crc16::{crc16, Crc16Variant};
use balancedn::engine::{SimConfig, SimTime, Simulation};
use balancedn::metrics::Scheme;
use balancedn::name::ContentName;
use balancedn::placement::Placement;
use balancedn::resolution::{Deployment, DeploymentConfig};
use balancedn::routing::RouteTable;
use balancedn::scenario::{
    category_prefixes, corpus_name, run_balancedn, run_flooding, run_scenario, PlannedRequest, ScenarioConfig,
    ScenarioId, Skew, REQUEST_SPACING,
};
use balancedn::topology::{NodeId, Role, Topology, PRESET_NAMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const BALANCE_TOLERANCE: f64 = 0.02;
const CHI2_CRITICAL_DF7: f64 = 24.32;
const LONG_RANGE_MIN_RATIO: f64 = 1.5;
const S3_MIN_R2: f64 = 0.95;
const S3_CONTENT: usize = 65_536;
const S4_MAX_RATIO: f64 = 2.0;
const S4_BALANCED_MAX_RATIO: f64 = 1.25;
/// Probe timings are wall-clock; a criterion passes if any attempt is within bounds.
const S4_ATTEMPTS: usize = 3;
const RANDOM_GRAPHS: usize = 100;
const PER_HOP_NS: u64 = 1_001_024;

// Pinned runtime budgets.
const BUDGET_BALANCE: Duration = Duration::from_secs(5);
const BUDGET_CRC: Duration = Duration::from_secs(1);
const BUDGET_NSFNET: Duration = Duration::from_secs(30);
const BUDGET_S3: Duration = Duration::from_secs(60);
const BUDGET_S4: Duration = Duration::from_secs(30);
const BUDGET_SHORTCUT: Duration = Duration::from_secs(5);
const BUDGET_INVARIANTS: Duration = Duration::from_secs(30);
const BUDGET_DETERMINISM: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_balance() -> Outcome {
    let p = Placement::new(8, Crc16Variant::Arc).map_err(|e| e.to_string())?;
    let mut counts = [0u64; 8];
    for i in 0..1_000_000 {
        counts[p.assign(&corpus_name(i)).value()] += 1;
    }
    let expected = 125_000.0;
    let worst = counts
        .iter()
        .map(|c| (*c as f64 - expected).abs() / expected)
        .fold(0.0, f64::max);
    check(worst <= BALANCE_TOLERANCE, || format!("max deviation {:.4} over {BALANCE_TOLERANCE}: {counts:?}", worst))?;

    // uniformity on unstructured names
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let alphabet = b"abcdefghijklmnopqrstuvwxyz0123456789-_";
    let mut random = [0u64; 8];
    let mut buf = Vec::with_capacity(40);
    for _ in 0..1_000_000 {
        let len = rng.gen_range(8..=32);
        buf.clear();
        buf.push(b'/');
        for _ in 1..len {
            buf.push(alphabet[rng.gen_range(0..alphabet.len())]);
        }
        random[p.assign_bytes(&buf).value()] += 1;
    }
    let chi2: f64 = random.iter().map(|c| (*c as f64 - expected).powi(2) / expected).sum();
    check(chi2 < CHI2_CRITICAL_DF7, || format!("chi2 {chi2:.2} >= {CHI2_CRITICAL_DF7}"))?;
    Ok(format!("corpus max deviation {:.3}%, random-name chi2 {chi2:.2}", worst * 100.0))
}

fn c2_crc() -> Outcome {
    let checks = [
        (Crc16Variant::Arc, 0xBB3D),
        (Crc16Variant::Modbus, 0x4B37),
        (Crc16Variant::Xmodem, 0x31C3),
    ];
    for (v, want) in checks {
        let got = v.engine().checksum(b"123456789");
        check(got == want, || format!("{v:?} check 0x{got:04X} != 0x{want:04X}"))?;
    }
    check(crc16(b"") == 0, || "empty input".into())?;
    check(crc16(b"/video/a.mp4") == 0x1537, || "/video/a.mp4".into())?;
    let name = ContentName::parse("/video/a.mp4").map_err(|e| e.to_string())?;
    let p = Placement::new(8, Crc16Variant::Arc).map_err(|e| e.to_string())?;
    check(p.assign(&name).value() == 0x1537 % 8, || "assignment".into())?;
    Ok("ARC 0xBB3D, MODBUS 0x4B37, XMODEM 0x31C3".into())
}

fn c3_nsfnet_pairs() -> Outcome {
    let t = Arc::new(Topology::preset("nsfnet").map_err(|e| e.to_string())?);
    let routes = Arc::new(RouteTable::new(&t));
    let producers = t.nodes_with_role(Role::Producer);
    let mut d = Deployment::new(t.clone(), routes.clone(), &DeploymentConfig::default()).map_err(|e| e.to_string())?;
    d.delegate_round_robin(&category_prefixes()).map_err(|e| e.to_string())?;
    let mut plan = Vec::new();
    for (i, consumer) in t.nodes_with_role(Role::Consumer).into_iter().enumerate() {
        for (j, producer) in producers.iter().enumerate() {
            if routes.distance(consumer, *producer).map_err(|e| e.to_string())? < 2 {
                continue;
            }
            let content = ContentName::parse(&format!("/cat{}/pair{i}x{j}", (i + j) % 16)).unwrap();
            d.register_content(*producer, content.clone(), SimTime::ZERO).map_err(|e| e.to_string())?;
            plan.push(PlannedRequest { consumer, content, producer: *producer });
        }
    }
    let config = SimConfig { cs_capacity: 0, ..SimConfig::default() };
    let flood = run_flooding(t.clone(), &plan, &config).map_err(|e| e.to_string())?;
    let (bdn, _) = run_balancedn(d, &plan, &config).map_err(|e| e.to_string())?;
    let mut max_d = 0;
    let mut at_max = (0u64, 0u64);
    for ((req, f), b) in plan.iter().zip(&flood).zip(&bdn) {
        check(f.satisfied() && b.satisfied(), || format!("unsatisfied {}", req.content))?;
        check(b.interest_traversals < f.interest_traversals, || {
            format!("{} -> {}: {} >= {}", req.consumer, req.producer, b.interest_traversals, f.interest_traversals)
        })?;
        let dist = routes.distance(req.consumer, req.producer).unwrap();
        if dist > max_d {
            max_d = dist;
            at_max = (0, 0);
        }
        if dist == max_d {
            at_max.0 += u64::from(f.interest_traversals);
            at_max.1 += u64::from(b.interest_traversals);
        }
    }
    let ratio = at_max.0 as f64 / at_max.1 as f64;
    check(ratio >= LONG_RANGE_MIN_RATIO, || format!("ratio {ratio:.2} at distance {max_d}"))?;
    Ok(format!("{} pairs, flooding/balancedn {ratio:.2} at distance {max_d}", plan.len()))
}

fn c4_s3() -> Outcome {
    let mut config = ScenarioConfig::new(ScenarioId::S3, "oteglobe");
    config.content_count = Some(S3_CONTENT);
    config.schemes = vec![Scheme::BalanceDn];
    let report = run_scenario(&config).map_err(|e| e.to_string())?;
    let points: Vec<(f64, f64)> = report
        .bins()
        .into_iter()
        .map(|(d, by)| (f64::from(d), by[&Scheme::BalanceDn].interest_mean))
        .collect();
    check(points.len() == 16, || format!("{} bins", points.len()))?;
    check(points.windows(2).all(|w| w[0].1 < w[1].1), || format!("not increasing: {points:?}"))?;
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    check(r2 >= S3_MIN_R2, || format!("R^2 {r2:.4}"))?;
    Ok(format!("16 bins, slope {:.3}, R^2 {r2:.4}", sxy / sxx))
}

fn s4_ratio(skew: &str, resolvers: usize) -> Result<f64, String> {
    let mut config = ScenarioConfig::new(ScenarioId::S4, "nsfnet");
    config.resolver_count = resolvers;
    config.skew = Some(skew.parse::<Skew>()?);
    let report = run_scenario(&config).map_err(|e| e.to_string())?;
    let means: Vec<f64> = report.probes.iter().map(|p| p.mean_ms).collect();
    let max = means.iter().copied().fold(f64::MIN, f64::max);
    let min = means.iter().copied().fold(f64::MAX, f64::min);
    Ok(max / min)
}

fn best_of(skew: &str, resolvers: usize, limit: f64) -> Result<f64, String> {
    let mut best = f64::MAX;
    for _ in 0..S4_ATTEMPTS {
        best = best.min(s4_ratio(skew, resolvers)?);
        if best <= limit {
            break;
        }
    }
    Ok(best)
}

fn c5_s4() -> Outcome {
    let skewed = best_of("0:650000,others:50000", 8, S4_MAX_RATIO)?;
    check(skewed <= S4_MAX_RATIO, || format!("skewed max/min {skewed:.2}"))?;
    let even = best_of("0:200000,others:100000", 3, S4_BALANCED_MAX_RATIO)?;
    check(even <= S4_BALANCED_MAX_RATIO, || format!("3-shard max/min {even:.2}"))?;
    Ok(format!("max/min {skewed:.2} (650k vs 50k), {even:.2} (200k vs 100k)"))
}

fn c6_shortcut() -> Outcome {
    let mut checked = 0;
    for preset in PRESET_NAMES {
        let t = Arc::new(Topology::preset(preset).map_err(|e| e.to_string())?);
        let routes = Arc::new(RouteTable::new(&t));
        let producers = t.nodes_with_role(Role::Producer);
        let consumers = t.nodes_with_role(Role::Consumer);
        let mut d = Deployment::new(t.clone(), routes, &DeploymentConfig::default()).map_err(|e| e.to_string())?;
        d.delegate_round_robin(&category_prefixes()).map_err(|e| e.to_string())?;
        let mut names = Vec::new();
        for i in 0..16 {
            let name = ContentName::parse(&format!("/cat{i}/zone{i}")).unwrap();
            d.register_in_zone(producers[i % producers.len()], name.clone(), SimTime::ZERO)
                .map_err(|e| e.to_string())?;
            names.push((consumers[(i * 7) % consumers.len()], name));
        }
        let config = SimConfig { cs_capacity: 0, ..SimConfig::default() };
        let mut sim = Simulation::balancedn(d, &config).map_err(|e| e.to_string())?;
        let mut pairs = Vec::new();
        for (k, (c, name)) in names.iter().enumerate() {
            let at = |r: u64| SimTime::from_nanos(REQUEST_SPACING.as_nanos() * (2 * k as u64 + r));
            let first = sim.request(at(0), *c, name.clone()).map_err(|e| e.to_string())?;
            let second = sim.request(at(1), *c, name.clone()).map_err(|e| e.to_string())?;
            pairs.push((first, second));
        }
        sim.run().map_err(|e| e.to_string())?;
        for (a, b) in pairs {
            let (a, b) = (sim.flow(a).unwrap(), sim.flow(b).unwrap());
            check(a.satisfied() && b.satisfied(), || format!("{preset}: {} unsatisfied", a.content))?;
            check(b.interest_traversals < a.interest_traversals, || {
                format!("{preset}: {} second {} >= first {}", a.content, b.interest_traversals, a.interest_traversals)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} names on {} presets", PRESET_NAMES.len()))
}

fn c7_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut graphs = 0;
    while graphs < RANDOM_GRAPHS {
        let size = rng.gen_range(8..=30);
        let extra = rng.gen_range(0..size as usize / 2);
        let t = Arc::new(common::random_graph(&mut rng, size, extra, &[]));
        let consumer = NodeId(rng.gen_range(0..size));
        let producer = NodeId(rng.gen_range(0..size));
        if consumer == producer {
            continue;
        }
        graphs += 1;
        let routes = RouteTable::new(&t);
        let d = routes.distance(consumer, producer).map_err(|e| e.to_string())?;
        let name = ContentName::parse(&format!("/g{graphs}/x")).unwrap();
        let source: HashMap<ContentName, NodeId> = HashMap::from([(name.clone(), producer)]);
        let config = SimConfig {
            cs_capacity: 0,
            payload_bits: NonZeroU32::new(1024).unwrap(),
            ..SimConfig::default()
        };
        let mut sim = Simulation::flooding(t.clone(), Arc::new(source), &config);
        let flow = sim.request(SimTime::ZERO, consumer, name).map_err(|e| e.to_string())?;
        sim.run().map_err(|e| e.to_string())?;
        let rec = sim.flow(flow).unwrap();
        check(rec.satisfied(), || format!("graph {graphs}: unsatisfied"))?;
        let path = rec.interest_path.clone().unwrap_or_default();
        check(path.len() as u32 == d + 1 && rec.path_hops == d, || format!("graph {graphs}: reverse path"))?;
        check(rec.interest_traversals as usize <= 2 * t.link_count(), || format!("graph {graphs}: transmissions"))?;
        let bound = SimTime::from_nanos(2 * u64::from(d) * PER_HOP_NS);
        check(rec.latency().is_some_and(|l| l <= bound), || format!("graph {graphs}: latency"))?;
        check(sim.conserved() && sim.live_pit_entries() == 0, || format!("graph {graphs}: conservation"))?;
    }
    Ok(format!("{graphs} random graphs"))
}

fn c8_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("s2-{k}.csv"));
        let args = [
            "balancedn", "run", "--scenario", "s2", "--topology", "nsfnet-populated", "--seed", "42", "--out",
            path.to_str().unwrap(),
        ];
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = balancedn::cli::run_cli(args, &mut out, &mut err);
        check(code == 0, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    check(outputs[0] == outputs[1], || "outputs differ".into())?;
    Ok(format!("{} identical bytes", outputs[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("1 shard balance over 1M names", c1_balance, BUDGET_BALANCE),
        ("2 CRC16 conformance", c2_crc, BUDGET_CRC),
        ("3 nsfnet pairs beat flooding", c3_nsfnet_pairs, BUDGET_NSFNET),
        ("4 s3 linear growth", c4_s3, BUDGET_S3),
        ("5 s4 lookup times", c5_s4, BUDGET_S4),
        ("6 cached locator shortcut", c6_shortcut, BUDGET_SHORTCUT),
        ("7 forwarding invariants", c7_invariants, BUDGET_INVARIANTS),
        ("8 deterministic s2 output", c8_determinism, BUDGET_DETERMINISM),
    ];
    let mut failed = 0;
    for (label, f, budget) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{label}] {detail} ({:.2}s)", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL [{label}] {why} ({:.2}s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
