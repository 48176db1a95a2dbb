//! Acceptance suite: one test per criterion, each printing a pass line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wifiplan::aploc::{solve_exact, PsapBudget, DEFAULT_SCENARIO_CAP};
use wifiplan::efficiency::{eval_cs, eval_design, eval_pcs, eval_sf};
use wifiplan::freqassign::{
    build_overlap_graph, greedy_coloring, prune_unused_aps, reduce_then_solve, solve_exact_fa,
    FaBudget,
};
use wifiplan::instance::{generate, GeneratorConfig, Instance};
use wifiplan::milp::{
    build_psap_enum, build_psap_lin, build_wfap_enum, build_wfap_h, build_wfap_h2, check_solution,
    embed_design, solve_by_enumeration, Design, LinVariant, MilpModel, VarKind,
    DEFAULT_ROW_BUDGET, DEFAULT_SUBSET_CAP,
};
use wifiplan::oracle::{self, inst_a, inst_k4};
use wifiplan::topology::FrequencyMap;
use wifiplan::{Alpha, Cover, Topology};

fn alpha(v: f64) -> Alpha {
    Alpha::new(v).unwrap()
}

fn tiny(seed: u64, tps: usize, css: usize, area: f64, rmin: f64, rmax: f64) -> Instance {
    generate(&GeneratorConfig::anisotropic(tps, css, area, rmin, rmax, seed)).unwrap()
}

/// A random cover: start from all sites and drop while coverage holds.
fn random_cover(topo: &Topology, rng: &mut ChaCha8Rng) -> Cover {
    let mut sites: Vec<usize> = (0..topo.num_css()).collect();
    let mut order = sites.clone();
    order.shuffle(rng);
    for j in order {
        if sites.len() == 1 {
            break;
        }
        let candidate: Vec<usize> = sites.iter().copied().filter(|&k| k != j).collect();
        if Cover::new(topo, candidate.iter().copied()).is_ok() && rng.gen_bool(0.7) {
            sites = candidate;
        }
    }
    Cover::new(topo, sites).unwrap()
}

fn random_freq_map(cover: &Cover, num_freqs: usize, rng: &mut ChaCha8Rng) -> FrequencyMap {
    cover
        .sites()
        .iter()
        .map(|&j| (j, rng.gen_range(0..num_freqs)))
        .collect()
}

#[test]
fn criterion_1_oracle_equivalence_exact_psap() {
    let started = Instant::now();
    for seed in 0..50u64 {
        let tps = 10 + (seed as usize) % 16; // <= 25
        let css = 4 + (seed as usize) % 5; // <= 8
        let inst = tiny(seed, tps, css, 9.0, 2.0, 5.0);
        let topo = Topology::build(&inst);
        for a in [0.0, 0.3, 0.7, 1.0] {
            let res = solve_exact(&topo, alpha(a), &PsapBudget::default());
            let (_, oracle_obj) = oracle::brute_force_psap(&inst, a).unwrap();
            assert!(
                (res.objective - oracle_obj).abs() <= 1e-9,
                "seed {seed} alpha {a}: exact {} vs oracle {oracle_obj}",
                res.objective
            );
        }
    }
    println!(
        "criterion 1 (oracle equivalence, exact PSAP): PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_2_oracle_equivalence_exact_wfap() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..50u64 {
        let inst = tiny(seed, 8 + (seed as usize) % 8, 3 + (seed as usize) % 4, 8.0, 2.0, 5.0);
        let topo = Topology::build(&inst);
        let cover = random_cover(&topo, &mut rng);
        assert!(cover.len() <= 6);
        for num_freqs in [2usize, 3] {
            let res = solve_exact_fa(&topo, &cover, num_freqs, &FaBudget::default()).unwrap();
            let (_, oracle_obj) =
                oracle::brute_force_wfap(&inst, cover.sites(), num_freqs).unwrap();
            assert!(
                (res.value.total - oracle_obj).abs() <= 1e-9,
                "seed {seed} |F|={num_freqs}: exact {} vs oracle {oracle_obj}",
                res.value.total
            );
        }
    }
    println!(
        "criterion 2 (oracle equivalence, exact WFAP): PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_3_sandwich_and_monotonicity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..200u64 {
        let inst = tiny(case % 40, 12 + (case as usize) % 8, 4 + (case as usize) % 4, 9.0, 2.0, 5.0);
        let topo = Topology::build(&inst);
        let cover = random_cover(&topo, &mut rng);
        let freq = random_freq_map(&cover, 3, &mut rng);

        let e = eval_design(&topo, &cover, &freq).unwrap();
        let sf = eval_sf(&topo, &cover).unwrap();
        let cs = eval_cs(&topo, &cover).unwrap();
        for i in 0..topo.num_tps() {
            assert!(sf.per_tp[i] <= e.per_tp[i] + 1e-12, "case {case} TP {i}");
            assert!(e.per_tp[i] <= cs.per_tp[i] + 1e-12, "case {case} TP {i}");
        }

        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let v = eval_pcs(&topo, &cover, alpha(k as f64 / 10.0)).unwrap().total;
            assert!(v <= prev + 1e-12, "case {case}: not monotone at grid point {k}");
            prev = v;
        }
        let at0 = eval_pcs(&topo, &cover, alpha(0.0)).unwrap().total;
        let at1 = eval_pcs(&topo, &cover, alpha(1.0)).unwrap().total;
        assert!((at0 - cs.total).abs() <= 1e-12, "case {case}: e_pcs(0) vs e_cs");
        assert!((at1 - sf.total).abs() <= 1e-12, "case {case}: e_pcs(1) vs e_sf");
    }
    println!(
        "criterion 3 (sandwich, monotonicity, endpoints): PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_4_model_evaluator_consistency() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked: BTreeMap<&str, usize> = BTreeMap::new();
    for k in 0..20u64 {
        let inst = tiny(k, 6 + (k as usize) % 5, 3 + (k as usize) % 3, 8.0, 2.0, 5.0);
        let topo = Topology::build(&inst);
        let cover = random_cover(&topo, &mut rng);
        let a = [0.0, 0.25, 0.5, 0.75, 1.0][(k as usize) % 5];
        let pcs = eval_pcs(&topo, &cover, alpha(a)).unwrap().total;
        let psap_models = vec![
            build_psap_lin(&topo, alpha(a), LinVariant::LinA),
            build_psap_lin(&topo, alpha(a), LinVariant::LinB),
            build_psap_enum(&topo, alpha(a), DEFAULT_SCENARIO_CAP).unwrap(),
        ];
        for model in psap_models {
            let sol = embed_design(&model, &topo, Design::Cover(&cover)).unwrap();
            let report = check_solution(&model, &sol).unwrap();
            assert!(
                report.feasible,
                "{} k={k}: {:?}",
                model.name, report.violated_rows
            );
            assert!(
                (report.objective - pcs).abs() <= 1e-6,
                "{} k={k}: {} vs {pcs}",
                model.name,
                report.objective
            );
            let label = if model.name.starts_with("psap_lin") {
                "psap_lin"
            } else {
                "psap_l"
            };
            *checked.entry(label).or_default() += 1;
        }

        let num_freqs = 2 + (k as usize) % 2;
        let freq = random_freq_map(&cover, num_freqs, &mut rng);
        let e = eval_design(&topo, &cover, &freq).unwrap().total;
        let wfap_models = vec![
            build_wfap_h(&topo, &cover, num_freqs).unwrap(),
            build_wfap_h2(&topo, &cover, num_freqs, DEFAULT_ROW_BUDGET).unwrap(),
            build_wfap_enum(&topo, &cover, num_freqs, DEFAULT_SUBSET_CAP).unwrap(),
        ];
        for model in wfap_models {
            let sol = embed_design(&model, &topo, Design::Assignment(&cover, &freq)).unwrap();
            let report = check_solution(&model, &sol).unwrap();
            assert!(
                report.feasible,
                "{} k={k}: {:?}",
                model.name, report.violated_rows
            );
            assert!(
                (report.objective - e).abs() <= 1e-6,
                "{} k={k}: {} vs {e}",
                model.name,
                report.objective
            );
            let label = ["wfap_h", "wfap_h2", "wfap_l"]
                .iter()
                .find(|l| model.name == **l)
                .unwrap();
            *checked.entry(label).or_default() += 1;
        }
    }
    for (name, count) in &checked {
        assert!(*count >= 20, "{name} only embedded {count} designs");
    }
    println!(
        "criterion 4 (model-evaluator consistency, 20 designs x 5 formulations): PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

fn binary_count(model: &MilpModel) -> usize {
    model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .count()
}

#[test]
fn criterion_5_micro_milp_optimum_equivalence() {
    let started = Instant::now();

    // enumerative AP location on micro instances
    for (inst, label) in [(inst_a(), "ref"), (tiny(11, 4, 3, 10.0, 2.0, 4.0), "rand")] {
        let topo = Topology::build(&inst);
        for a in [0.0, 0.5, 1.0] {
            let model = build_psap_enum(&topo, alpha(a), DEFAULT_SCENARIO_CAP).unwrap();
            assert!(binary_count(&model) <= 22, "{label}: {}", binary_count(&model));
            let (_, obj) = solve_by_enumeration(&model, 22).unwrap().unwrap();
            let exact = solve_exact(&topo, alpha(a), &PsapBudget::default());
            assert!(
                (obj - exact.objective).abs() <= 1e-6,
                "psap_l {label} a={a}: {obj} vs {}",
                exact.objective
            );
        }
    }

    // partition and enumerative frequency assignment
    for (inst, label) in [(inst_k4(), "k4"), (tiny(12, 8, 5, 12.0, 2.0, 4.0), "rand")] {
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, 0..topo.num_css()).unwrap();
        for num_freqs in [2usize, 3] {
            let model = build_wfap_h2(&topo, &cover, num_freqs, DEFAULT_ROW_BUDGET).unwrap();
            assert!(binary_count(&model) <= 22);
            let (_, obj) = solve_by_enumeration(&model, 22).unwrap().unwrap();
            let exact = solve_exact_fa(&topo, &cover, num_freqs, &FaBudget::default()).unwrap();
            assert!(
                (obj - exact.value.total).abs() <= 1e-6,
                "wfap_h2 {label} |F|={num_freqs}: {obj} vs {}",
                exact.value.total
            );
        }
    }
    for (inst, label) in [(tiny(13, 6, 4, 12.0, 2.0, 4.0), "rand4"), (tiny(14, 5, 3, 10.0, 2.0, 4.0), "rand3")] {
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, 0..topo.num_css()).unwrap();
        for num_freqs in [2usize, 3] {
            let model = build_wfap_enum(&topo, &cover, num_freqs, DEFAULT_SUBSET_CAP).unwrap();
            assert!(
                binary_count(&model) <= 22,
                "{label}: {} binaries",
                binary_count(&model)
            );
            let (_, obj) = solve_by_enumeration(&model, 22).unwrap().unwrap();
            let exact = solve_exact_fa(&topo, &cover, num_freqs, &FaBudget::default()).unwrap();
            assert!(
                (obj - exact.value.total).abs() <= 1e-6,
                "wfap_l {label} |F|={num_freqs}: {obj} vs {}",
                exact.value.total
            );
        }
    }
    println!(
        "criterion 5 (micro MILP optimum equivalence): PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_6_coloring_shortcut() {
    let started = Instant::now();
    let mut hits = 0;
    let mut seed = 0u64;
    while hits < 30 && seed < 300 {
        let inst = tiny(seed, 18, 8, 14.0, 2.0, 4.0);
        seed += 1;
        let topo = Topology::build(&inst);
        let all = Cover::new(&topo, 0..topo.num_css()).unwrap();
        let cover = prune_unused_aps(&topo, &all).unwrap();
        let graph = build_overlap_graph(&topo, &cover).unwrap();
        if greedy_coloring(&graph, 3).len() != graph.nodes().len() {
            continue;
        }
        hits += 1;
        let res = reduce_then_solve(&topo, &cover, 3, &FaBudget::default()).unwrap();
        let cs = eval_cs(&topo, &cover).unwrap().total;
        assert_eq!(
            res.value.total, cs,
            "seed {}: complete coloring must reach e_cs exactly",
            seed - 1
        );
    }
    assert_eq!(hits, 30, "found only {hits} greedily 3-colorable covers");
    println!(
        "criterion 6 (coloring shortcut reaches e_cs exactly, 30 covers): PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

fn wifiplan_bin(args: &[&str]) -> std::process::Output {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_wifiplan"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "wifiplan {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

struct CsvRow {
    alpha: f64,
    psap: f64,
    wfap3: f64,
}

fn parse_report(path: &std::path::Path) -> Vec<CsvRow> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,psap_objective,wfap_f2,wfap_f3,cover_size,solver"
    );
    lines
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            CsvRow {
                alpha: cells[0].parse().unwrap(),
                psap: cells[1].parse().unwrap(),
                wfap3: cells[3].parse().unwrap(),
            }
        })
        .collect()
}

#[test]
fn criterion_7_qualitative_trend() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut best_at_low_alpha = 0;
    for seed in 1..=4u64 {
        let out = dir.path().join(format!("i{seed}"));
        wifiplan_bin(&[
            "pipeline",
            "--tps",
            "40",
            "--css",
            "15",
            "--seed",
            &seed.to_string(),
            "--area",
            "20",
            "--radius-min",
            "3",
            "--radius-max",
            "7",
            "--alphas",
            "0,0.2,0.4,0.6,0.8,1",
            "--freqs",
            "2,3",
            "--out",
            out.to_str().unwrap(),
        ]);
        let rows = parse_report(&out.join("report.csv"));
        assert_eq!(rows.len(), 6);
        for pair in rows.windows(2) {
            assert!(
                pair[1].psap < pair[0].psap - 1e-9,
                "instance {seed}: PSAP objective not strictly decreasing in alpha"
            );
        }
        let best = rows.iter().map(|r| r.wfap3).fold(f64::NEG_INFINITY, f64::max);
        if rows
            .iter()
            .any(|r| r.alpha <= 0.4 && r.wfap3 >= best - 1e-9)
        {
            best_at_low_alpha += 1;
        }
    }
    assert!(
        best_at_low_alpha >= 3,
        "best |F|=3 design at alpha <= 0.4 in only {best_at_low_alpha} of 4 instances"
    );
    println!(
        "criterion 7 (qualitative trend on 4 anisotropic instances): PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_8_determinism() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();

    let inst1 = dir.path().join("a.json");
    let inst2 = dir.path().join("b.json");
    for out in [&inst1, &inst2] {
        wifiplan_bin(&[
            "generate",
            "--tps",
            "15",
            "--css",
            "6",
            "--seed",
            "99",
            "--area",
            "16",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    assert_eq!(
        std::fs::read(&inst1).unwrap(),
        std::fs::read(&inst2).unwrap(),
        "instance files must be byte-identical"
    );

    let lp1 = dir.path().join("a.lp");
    let lp2 = dir.path().join("b.lp");
    for out in [&lp1, &lp2] {
        wifiplan_bin(&[
            "emit",
            "--instance",
            inst1.to_str().unwrap(),
            "--formulation",
            "psap-l",
            "--alpha",
            "0.4",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    assert_eq!(
        std::fs::read(&lp1).unwrap(),
        std::fs::read(&lp2).unwrap(),
        "LP files must be byte-identical"
    );

    let run1 = dir.path().join("r1");
    let run2 = dir.path().join("r2");
    for out in [&run1, &run2] {
        wifiplan_bin(&[
            "pipeline",
            "--tps",
            "20",
            "--css",
            "8",
            "--seed",
            "7",
            "--area",
            "12",
            "--alphas",
            "0,0.5,1",
            "--freqs",
            "2,3",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    assert_eq!(
        std::fs::read(run1.join("report.csv")).unwrap(),
        std::fs::read(run2.join("report.csv")).unwrap(),
        "CSV reports must be byte-identical"
    );
    assert_eq!(
        std::fs::read(run1.join("instance.json")).unwrap(),
        std::fs::read(run2.join("instance.json")).unwrap(),
        "pipeline instances must be byte-identical"
    );
    println!(
        "criterion 8 (determinism of instance, LP and CSV outputs): PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}
