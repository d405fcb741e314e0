//! Acceptance run: every criterion evaluated at its stated tolerance, one
//! `PASS`/`FAIL` line each plus indented detail lines.
//!
//! Criteria 3, 4 and 6 cannot hold as stated (see the reasons below); they
//! still run in full and print `FAIL`. The process exits non-zero if any other
//! criterion fails, or if one of those three unexpectedly passes.

use std::process::Command;
use std::time::{Duration, Instant};

use cpb_cli::commands::josephson::{envelope_slope, median, random_rows, ratio_slope, toy_rows};
use cpb_core::bloch::{closed_form, evolve_sampled, fit_coherence_decay, recommended_step, BlochState, Rates};
use cpb_core::linalg::{commutator, hermitian_eigenvalues};
use cpb_core::model::{build_h_collective, ModelParams};
use cpb_core::oracle::{effective_level_scaling, verify_bcs_structure, verify_multiplicities, ClosedForms};
use cpb_core::qubit::{
    build_h0_eff, charge_current_operators, frame_components, CouplingConvention, EffectiveSubspace, QubitFrame,
};
use cpb_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    elapsed: Duration,
    budget: Option<Duration>,
    details: Vec<String>,
}

/// Criteria that fail as stated, with the reason.
const KNOWN_FAILURES: &[(u32, &str)] = &[
    (
        3,
        "at m0 = 0 the dropped (g/K)(m^2 - m) terms vanish for m in {0, 1}; residuals sit at rounding level and carry no 1/K slope",
    ),
    (
        4,
        "toy ratio contains |sin(K/2)|, which does not average out over four K values; the envelope slope is 1/2",
    ),
    (
        6,
        "the collective tunneling element between m = 0 and m = 1 is |beta| sqrt(j(j+1))/2K, so the splitting is |beta|(1 + 1/K)/2",
    ),
];

fn timed(
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce(&mut Vec<String>) -> bool,
) -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let passed = f(&mut details);
    let elapsed = start.elapsed();
    Outcome {
        id,
        name,
        passed: passed && budget.is_none_or(|b| elapsed <= b),
        elapsed,
        budget,
        details,
    }
}

fn bcs_structure(d: &mut Vec<String>) -> bool {
    let mut ok = true;
    for g in [0.5, 1.0, 2.0] {
        let r = verify_bcs_structure(8, g, &ClosedForms::exact()).expect("oracle run");
        let gap_dev = r.gaps.iter().map(|x| (x.measured - g).abs()).fold(0.0, f64::max);
        let degs: Vec<usize> = r.gaps.iter().map(|x| x.degeneracy).collect();
        let all_seven = degs.iter().all(|&n| n == 7);
        d.push(format!(
            "g={g}: levels={} max|E - closed form|={:.2e} (tol {:.0e}) max|gap - g|={gap_dev:.2e} degeneracies={degs:?}",
            r.levels,
            r.max_deviation,
            1e-10 * g
        ));
        ok &= r.passed() && r.levels == 256 && gap_dev <= 1e-10 && all_seven && !r.gaps.is_empty();
    }
    ok
}

fn multiplicities(d: &mut Vec<String>) -> bool {
    let mut ok = true;
    for k in [2, 4, 6, 8, 10] {
        let r = verify_multiplicities(k, &ClosedForms::exact()).expect("oracle run");
        let rows: Vec<String> = r
            .rows
            .iter()
            .map(|x| format!("j={}:{}x{}", x.j, x.states / (x.j.doubled() as usize + 1), x.j.doubled() + 1))
            .collect();
        d.push(format!("K={k}: {} unassigned={}", rows.join(" "), r.unassigned));
        ok &= r.passed();
    }
    ok
}

fn effective_levels(d: &mut Vec<String>) -> bool {
    let ks = [6, 8, 10, 12];
    let mut bound_ok = true;
    let mut slope_ok = true;
    for ng in [0.2, 0.5, 0.8] {
        let base = ModelParams::from_gate_charge(6, 1.0, 1.0, ng, 0).expect("params");
        let s = effective_level_scaling(&base, &ks, &ClosedForms::exact()).expect("oracle run");
        let res: Vec<String> = s
            .reports
            .iter()
            .map(|r| format!("K={}:{:.1e}/{:.3}", r.params.k_sites(), r.max_residual(), r.bound))
            .collect();
        let all_within = s.reports.iter().all(|r| r.passed());
        bound_ok &= all_within;
        let slope_text = match s.slope {
            Some(x) => {
                slope_ok &= (x + 1.0).abs() <= 0.15;
                format!("{x:.3}")
            }
            None => {
                slope_ok = false;
                "none (residuals at rounding floor)".to_string()
            }
        };
        d.push(format!(
            "n_g={ng}: residual/bound {} within={all_within} slope={slope_text}",
            res.join(" ")
        ));
    }
    let off = ModelParams::new(6, 1.0, 1.0, 1.4, 1).expect("params");
    if let Ok(s) = effective_level_scaling(&off, &ks, &ClosedForms::exact()) {
        d.push(format!(
            "for reference m0=1, mbar=1.4: slope={}",
            s.slope.map_or("none".into(), |x| format!("{x:.3}"))
        ));
    }
    d.push(format!("bound part {}, slope part {}", verdict(bound_ok), verdict(slope_ok)));
    bound_ok && slope_ok
}

fn josephson_scaling(d: &mut Vec<String>) -> bool {
    let ks = [1_000, 10_000, 100_000, 1_000_000];
    let rows = toy_rows(1.0, Some(1.0), &ks).expect("toy rows");
    let slope = ratio_slope(&rows);
    let ratios: Vec<String> = rows.iter().map(|r| format!("{:.1}", r.energies.ratio())).collect();
    d.push(format!(
        "toy lambda=1: ratios {} slope={slope:.4} (want 0.50 +- 0.05) envelope slope={:.4}",
        ratios.join(" "),
        envelope_slope(1.0, &rows)
    ));
    let mut rnd: Vec<f64> = random_rows(0, 100, 1.0, &[10_000])
        .expect("random rows")
        .iter()
        .map(|r| r.energies.ratio())
        .collect();
    let med = median(&mut rnd);
    let med_ok = (1.0 / 3.0..=3.0).contains(&med);
    d.push(format!("random 100 seeds K=1e4: median ratio={med:.4} (want [1/3, 3]) {}", verdict(med_ok)));
    (slope - 0.5).abs() <= 0.05 && med_ok
}

fn qubit_frame(d: &mut Vec<String>) -> bool {
    let k = 50;
    let e_c = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_spec = 0.0f64;
    let mut worst_comm = 0.0f64;
    let mut sandwich_ok = true;
    let mut points = 0;
    for i in 0..100 {
        let ng = i as f64 / 99.0;
        for e_j in [0.1, 0.5, 2.0] {
            points += 1;
            let raw: Vec<C64> = (1..k).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let xi: Vec<C64> = raw.iter().map(|z| z * (e_j / n)).collect();
            let gate = 4.0 * e_c * (1.0 - 2.0 * ng);
            let sub = EffectiveSubspace::from_gate_energy(gate, xi).expect("subspace");
            let h = build_h0_eff(&sub, CouplingConvention::Half).expect("arrowhead");
            let ev = hermitian_eigenvalues(&h).expect("eigenvalues");
            let omega = gate.hypot(e_j);
            let mut want = vec![gate / 2.0; k];
            want[0] = -omega / 2.0;
            want[k - 1] = omega / 2.0;
            want.sort_by(f64::total_cmp);
            let dev = ev.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst_spec = worst_spec.max(dev / omega);
            sandwich_ok &= -omega / 2.0 <= gate / 2.0 && gate / 2.0 <= omega / 2.0;

            let frame = QubitFrame::new(&sub).expect("frame");
            let q = charge_current_operators(&frame, 1.0).expect("charge");
            let j = commutator(&h, &q.charge).expect("commutator").scale(C64::new(0.0, 1.0));
            let c = frame_components(&frame, &j);
            let scale = j.frobenius_norm();
            let off = [c.x.norm(), c.z.norm(), c.identity.norm(), c.p0.norm(), c.remainder]
                .into_iter()
                .fold(0.0, f64::max);
            worst_comm = worst_comm.max(off / scale);
        }
    }
    d.push(format!(
        "{points} points, K={k}: max spectrum deviation/omega={worst_spec:.2e} (tol 1e-10) sandwich={sandwich_ok} max non-sigma^y share={worst_comm:.2e} (tol 1e-10)"
    ));
    worst_spec <= 1e-10 && sandwich_ok && worst_comm <= 1e-10
}

fn collective_limit(d: &mut Vec<String>) -> bool {
    let k = 2000;
    let beta = C64::new(0.2, 0.0);
    let (g, e_c) = (1.0, 1.0);
    let splitting = |m_bar: f64| {
        let h = build_h_collective(k, g, e_c, m_bar, beta).expect("collective H");
        let ev = hermitian_eigenvalues(&h).expect("eigenvalues");
        ev[1] - ev[0]
    };
    // `J_z` plays the role of the pair number; the charge degeneracy of the
    // collective model sits at m̄ = 1/2.
    let s = splitting(0.5);
    let target = beta.norm();
    let rel = (s / target - 1.0).abs();
    d.push(format!(
        "K={k} beta={} mbar=0.5: splitting={s:.9} |beta|={target} |s/|beta| - 1|={rel:.3e} (tol 5/K = {:.1e})",
        beta.norm(),
        5.0 / k as f64
    ));
    let predicted = target * (((k / 2) as f64 * ((k / 2) as f64 + 1.0)).sqrt() / k as f64);
    d.push(format!(
        "for reference: |beta| sqrt(j(j+1))/K = {predicted:.9}; with mbar = 1/2 + g/8Ec the splitting is {:.6}",
        splitting(0.5 + g / (8.0 * e_c))
    ));
    rel <= 5.0 / k as f64
}

fn random_rates(rng: &mut ChaCha8Rng, escape: bool) -> Rates {
    let mut r = || 5.0 * rng.random::<f64>();
    let (a, b, c) = (r(), r(), r());
    let (e1, e2) = if escape { (r(), r()) } else { (0.0, 0.0) };
    Rates::new(a, b, c, e1, e2).expect("rates")
}

fn random_state(rng: &mut ChaCha8Rng) -> BlochState {
    let u: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
    let total = rng.random_range(0.5..=1.0) / u.iter().sum::<f64>();
    let (pp, p0, pm) = (u[0] * total, u[1] * total, u[2] * total);
    let alpha = C64::from_polar((pp * pm).sqrt() * rng.random::<f64>(), rng.random_range(0.0..std::f64::consts::TAU));
    BlochState::new(0.0, pp, p0, pm, alpha).expect("state")
}

fn bloch_dynamics(d: &mut Vec<String>) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut worst_rate = 0.0f64;
    for _ in 0..1000 {
        let rates = random_rates(&mut rng, true);
        let omega = 5.0 * rng.random::<f64>();
        let t = 10.0 * rng.random::<f64>();
        let s0 = random_state(&mut rng);
        let dt = recommended_step(&rates, omega, t);
        let traj = evolve_sampled(&s0, &rates, omega, t, dt, 200).expect("integration");
        worst = worst.max(traj.last().max_difference(&closed_form(&s0, &rates, omega, t)));
        if let Some(fit) = fit_coherence_decay(&traj.samples) {
            if traj.samples.len() >= 3 {
                worst_rate = worst_rate.max((fit - rates.coherence_decay() / 2.0).abs());
            }
        }
    }
    let mut worst_sum = 0.0f64;
    for _ in 0..100 {
        let rates = random_rates(&mut rng, false);
        let omega = 5.0 * rng.random::<f64>();
        let s0 = random_state(&mut rng);
        let traj = evolve_sampled(&s0, &rates, omega, 10.0, recommended_step(&rates, omega, 10.0), 1).expect("integration");
        for s in &traj.samples {
            worst_sum = worst_sum.max((s.population() - s0.population()).abs());
        }
    }
    d.push(format!("1000 draws: max |RK4 - closed form|={worst:.2e} (tol 1e-8)"));
    d.push(format!("100 draws without escape: max population drift={worst_sum:.2e} (tol 1e-10)"));
    d.push(format!("coherence decay fit: max |rate - b/2|={worst_rate:.2e} (tol 1e-9)"));
    worst <= 1e-8 && worst_sum <= 1e-10 && worst_rate <= 1e-9
}

fn negative_control(d: &mut Vec<String>) -> bool {
    let bin = env!("CARGO_BIN_EXE_cpb");
    let run = |extra: &[&str]| {
        Command::new(bin)
            .arg("oracle")
            .args(extra)
            .output()
            .expect("spawn cpb")
            .status
            .code()
    };
    let clean = run(&[]);
    d.push(format!("uncorrupted: exit {clean:?}"));
    let mut ok = clean == Some(0);
    for c in ["gap=1.01", "pairing=1.01", "charging=1.01", "degeneracy=1", "multiplicity=1"] {
        let code = run(&["--corrupt", c]);
        d.push(format!("{c}: exit {code:?}"));
        ok &= code == Some(2);
    }
    ok
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() {
    let secs = Duration::from_secs;
    let outcomes = [
        timed(1, "bcs structure", Some(secs(5)), bcs_structure),
        timed(2, "su(2) multiplicities", Some(secs(30)), multiplicities),
        timed(3, "effective levels", Some(secs(120)), effective_levels),
        timed(4, "josephson scaling", Some(secs(10)), josephson_scaling),
        timed(5, "qubit frame", Some(secs(10)), qubit_frame),
        timed(6, "collective limit", Some(secs(30)), collective_limit),
        timed(7, "bloch dynamics", Some(secs(30)), bloch_dynamics),
        timed(8, "negative control", None, negative_control),
    ];
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let budget = o.budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        let known = KNOWN_FAILURES.iter().find(|(id, _)| *id == o.id);
        let tag = match (o.passed, known) {
            (false, Some(_)) => " [known, unattainable as stated]",
            (true, Some(_)) => " [expected to fail: update the record]",
            _ => "",
        };
        println!(
            "{} criterion {} {}: {:.2}s{budget}{tag}",
            verdict(o.passed),
            o.id,
            o.name,
            o.elapsed.as_secs_f64()
        );
        for line in &o.details {
            println!("    {line}");
        }
        if let (false, Some((_, why))) = (o.passed, known) {
            println!("    reason: {why}");
        }
        if o.passed == known.is_some() {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria pass", outcomes.len());
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
