//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails afterwards if any criterion did.

use std::time::{Duration, Instant};

use minerisk::figures::{generate, FigureId, FigureOptions, Table};
use minerisk::montecarlo::{estimate, with_workers, Functional, HorizonKind, Miner, Quantity};
use minerisk::params::{net_profit_frontier_honest, QUOTED_REWARD_2020};
use minerisk::rootfind::CharacteristicEquation;
use minerisk::segments::{frontier_segment1, frontier_segment2};
use minerisk::selfish::{characteristic_constants, reward_pmf, CharacteristicSolution, SelfishState};
use minerisk::{honest, Economics, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use SelfishState::{Empty, Fork, One};

const PATHS: u64 = 250_000;
const U_GRID: [f64; 4] = [5_000.0, 11_000.0, 41_000.0, 81_000.0];

fn econ(price: f64) -> Economics {
    Economics::january_2020()
        .with_reward_override(Some(QUOTED_REWARD_2020))
        .unwrap()
        .with_electricity_price(price)
        .unwrap()
}

fn params(price: f64, q: f64, t: f64) -> Params {
    Params::from_economics(&econ(price), 6.0, q, 0.0, t).unwrap()
}

struct Report {
    lines: Vec<String>,
    failed: Vec<usize>,
}

impl Report {
    fn record(&mut self, n: usize, name: &str, ok: bool, detail: String) {
        let line = format!(
            "criterion {n} ({name}): {} | {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        self.lines.push(line);
        if !ok {
            self.failed.push(n);
        }
    }
}

/// Checks collected inside one criterion.
#[derive(Default)]
struct Checks {
    ok: bool,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        println!("    [{}] {note}", if ok { "ok" } else { "FAILED" });
        if !ok {
            self.ok = false;
            self.notes.push(note);
        }
    }

    fn summary(&self, pass_text: &str) -> String {
        if self.ok {
            pass_text.to_string()
        } else {
            format!("failed: {}", self.notes.join("; "))
        }
    }
}

fn z_check(checks: &mut Checks, label: &str, exact: f64, mean: f64, stderr: f64) {
    let z = if stderr > 0.0 {
        (exact - mean).abs() / stderr
    } else if exact == mean {
        0.0
    } else {
        f64::INFINITY
    };
    checks.check(
        z <= 3.0,
        format!("{label}: exact {exact:.6e}, mc {mean:.6e} ± {stderr:.3e}, z {z:.2}"),
    );
}

fn timed(checks: &mut Checks, label: &str, limit: Duration, f: impl FnOnce(&mut Checks)) {
    let start = Instant::now();
    f(checks);
    let took = start.elapsed();
    checks.check(took <= limit, format!("{label} took {took:.2?} (limit {limit:?})"));
}

fn criterion1() -> (bool, String) {
    let mut c = Checks::new();
    let t = 6.0;
    let par = params(0.06, 1.0, t);
    let limit = Duration::from_secs(120);
    let cases: [(&str, Functional, HorizonKind); 4] = [
        ("psi(u,t)", Functional::Ruin, HorizonKind::Deterministic),
        ("psi_hat(u,t)", Functional::Ruin, HorizonKind::Exponential),
        ("V(u,t)", Functional::Value, HorizonKind::Deterministic),
        ("V_hat(u,t)", Functional::Value, HorizonKind::Exponential),
    ];
    for (k, (label, functional, horizon)) in cases.into_iter().enumerate() {
        timed(&mut c, label, limit, |c| {
            for (i, u) in U_GRID.into_iter().enumerate() {
                let exact = match (functional, horizon) {
                    (Functional::Ruin, HorizonKind::Deterministic) => honest::ruin_prob_finite(&par, u, t),
                    (Functional::Ruin, _) => honest::ruin_prob_exp_horizon(&par, u).unwrap(),
                    (Functional::Value, HorizonKind::Deterministic) => honest::value_deterministic(&par, u, t).unwrap(),
                    (Functional::Value, _) => honest::value_exp_horizon(&par, u).unwrap(),
                };
                let q = Quantity::new(Miner::Honest, functional, horizon);
                let mc = estimate(q, &par.with_u(u).unwrap(), Empty, PATHS, 1_000 + 10 * k as u64 + i as u64).unwrap();
                z_check(c, &format!("{label} u={u}"), exact, mc.mean, mc.stderr);
            }
        });
    }
    (c.ok, c.summary("16 closed-form values inside 3 standard errors of 250k-path estimates"))
}

fn criterion2() -> (bool, String) {
    let mut c = Checks::new();
    let par = params(0.04, 0.5, 6.0);
    let start = Instant::now();
    let sol = CharacteristicSolution::solve(&par).unwrap();
    for (label, functional) in [("V0_hat(u,t)", Functional::Value), ("psi0_hat(u,t)", Functional::Ruin)] {
        for (i, u) in U_GRID.into_iter().enumerate() {
            let exact = match functional {
                Functional::Value => sol.value(u),
                Functional::Ruin => sol.ruin(u),
            };
            let q = Quantity::new(Miner::Selfish, functional, HorizonKind::Exponential);
            let mc = estimate(q, &par.with_u(u).unwrap(), Empty, PATHS, 2_000 + i as u64).unwrap();
            z_check(&mut c, &format!("{label} u={u}"), exact, mc.mean, mc.stderr);
        }
    }
    let took = start.elapsed();
    c.check(took <= Duration::from_secs(180), format!("battery took {took:.2?} (limit 180s)"));
    (c.ok, c.summary("8 withholding values inside 3 standard errors of 250k-path estimates"))
}

fn rel_residual(terms: &[f64]) -> f64 {
    let scale = terms.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>().abs() / scale
    }
}

fn criterion3() -> (bool, String) {
    let mut c = Checks::new();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let honest_par = params(0.06, 1.0, 6.0);
    let par = params(0.04, 0.5, 6.0);
    let sol = CharacteristicSolution::solve(&par).unwrap();
    let (lam, p, q, b, cc, t) = (par.lambda(), par.p(), par.q(), par.b(), par.c(), par.t());
    let lp = lam * p;
    let us: Vec<f64> = (0..50).map(|_| rng.random_range(0.0..20.0 * b)).collect();

    // Protocol-following value at an exponential horizon.
    let (hc, hlp, ht, hb) = (honest_par.c(), honest_par.honest_income_rate() / honest_par.b(), honest_par.t(), honest_par.b());
    let v = |u: f64| honest::value_exp_horizon(&honest_par, u).unwrap();
    let worst = us
        .iter()
        .map(|&u| {
            let dv = honest::value_exp_horizon_du(&honest_par, u).unwrap();
            rel_residual(&[hc * dv, (1.0 / ht + hlp) * v(u), -hlp * v(u + hb), -u / ht])
        })
        .fold(0.0, f64::max);
    c.check(worst <= 1e-7, format!("protocol value equation: max relative residual {worst:.2e}"));

    // State system for the withholding value and ruin functions.
    for (name, value) in [("value", true), ("ruin", false)] {
        let f = |z, x: f64, k| {
            if value {
                sol.value_state_derivative(z, x, k)
            } else {
                sol.ruin_state_derivative(z, x, k)
            }
        };
        let worst = us
            .iter()
            .map(|&u| {
                let pay = if value { -u / t } else { 0.0 };
                let e0 = rel_residual(&[cc * f(Empty, u, 1), (lp + 1.0 / t) * f(Empty, u, 0), -lp * f(One, u, 0), pay]);
                let e1 = rel_residual(&[
                    cc * f(One, u, 1),
                    (lam + 1.0 / t) * f(One, u, 0),
                    -lp * f(Empty, u + 2.0 * b, 0),
                    -lam * (1.0 - p) * f(Fork, u, 0),
                    pay,
                ]);
                let e2 = rel_residual(&[
                    cc * f(Fork, u, 1),
                    (lam + 1.0 / t) * f(Fork, u, 0),
                    -lp * f(Empty, u + 2.0 * b, 0),
                    -lam * (1.0 - p) * q * f(Empty, u + b, 0),
                    -lam * (1.0 - p) * (1.0 - q) * f(Empty, u, 0),
                    pay,
                ]);
                e0.max(e1).max(e2)
            })
            .fold(0.0, f64::max);
        c.check(worst <= 1e-7, format!("withholding {name} state system: max relative residual {worst:.2e}"));
    }

    // Third-order equations, inhomogeneous for the value and homogeneous
    // for the ruin probability.
    let d = sol.d;
    let norm = lam * lam * p * (1.0 - p);
    let slope = (1.0 + lam * t * (p + 2.0) + (lam * t).powi(2) * (1.0 + 2.0 * p - p * p)) / (norm * t.powi(3));
    let intercept = cc * (2.0 + lam * t * (p + 2.0)) / (norm * t * t);
    for (name, value) in [("value", true), ("ruin", false)] {
        let f = |x: f64, k| {
            if value {
                sol.value_state_derivative(Empty, x, k)
            } else {
                sol.ruin_state_derivative(Empty, x, k)
            }
        };
        let worst = us
            .iter()
            .map(|&u| {
                let rhs = if value { slope * u + intercept } else { 0.0 };
                rel_residual(&[
                    d[3] * f(u, 3),
                    d[4] * f(u, 2),
                    d[5] * f(u, 1),
                    d[6] * f(u, 0),
                    -d[0] * f(u + 2.0 * b, 1),
                    -d[1] * f(u + 2.0 * b, 0),
                    -d[2] * f(u + b, 0),
                    -rhs,
                ])
            })
            .fold(0.0, f64::max);
        c.check(worst <= 1e-7, format!("third-order {name} equation: max relative residual {worst:.2e}"));
    }

    // Boundary conditions.
    let k = (lp / cc).powi(2);
    let v0 = |x: f64, n| sol.value_state_derivative(Empty, x, n);
    let r0 = |x: f64, n| sol.ruin_state_derivative(Empty, x, n);
    let scale = sol.c_const.abs();
    let vb = [
        v0(0.0, 0).abs() / scale,
        v0(0.0, 1).abs(),
        (v0(0.0, 2) - (k * v0(2.0 * b, 0) + 1.0 / (cc * t))).abs() / (k * v0(2.0 * b, 0) + 1.0 / (cc * t)).abs(),
    ];
    let worst = vb.iter().copied().fold(0.0, f64::max);
    c.check(worst <= 1e-8, format!("value boundary conditions: max relative error {worst:.2e}"));
    let target2 = k * (r0(2.0 * b, 0) - 1.0) + 1.0 / (cc * t).powi(2);
    let rb = [
        (r0(0.0, 0) - 1.0).abs(),
        (r0(0.0, 1) + 1.0 / (cc * t)).abs() * cc * t,
        (r0(0.0, 2) - target2).abs() / target2.abs(),
        (sol.ruin_state(One, 0.0) - 1.0).abs(),
        (sol.ruin_state(Fork, 0.0) - 1.0).abs(),
    ];
    let worst = rb.iter().copied().fold(0.0, f64::max);
    c.check(worst <= 1e-8, format!("ruin boundary conditions: max relative error {worst:.2e}"));

    let took = start.elapsed();
    c.check(took <= Duration::from_secs(5), format!("residual suites took {took:.2?} (limit 5s)"));
    (c.ok, c.summary("all residuals ≤ 1e-7, boundary errors ≤ 1e-8"))
}

/// Parameters with positive withholding drift.
fn random_params(rng: &mut ChaCha8Rng) -> Params {
    let lambda = rng.random_range(1.0..10.0);
    let p = rng.random_range(0.01..0.6);
    let q = rng.random_range(0.0..=1.0);
    let b = rng.random_range(1e3..1e6);
    let t = rng.random_range(1.0..1000.0);
    let income = lambda * b * reward_pmf(p, q).mean();
    let c = rng.random_range(0.05..0.95) * income;
    Params::new(lambda, p, b, c, q, 0.0, t).unwrap()
}

fn criterion4() -> (bool, String) {
    let mut c = Checks::new();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut counted = 0;
    for i in 0..20 {
        let par = random_params(&mut rng);
        let d = characteristic_constants(&par).unwrap().d;
        let eq = CharacteristicEquation::new(d, par.b());
        let n = eq.count_roots_negative_halfplane(eq.default_radius());
        let (_, r2) = eq.cubic_critical_points();
        let rho1 = eq.solve().map(|r| r.rho1.value);
        let ok = matches!(n, Ok(3)) && matches!(rho1, Ok(r) if r > r2 && r < 0.0);
        if ok {
            counted += 1;
        } else {
            c.check(false, format!("draw {i}: count {n:?}, rho1 {rho1:?}, r2 {r2:e}"));
        }
    }
    c.check(counted == 20, format!("{counted}/20 draws with 3 roots and rho1 in (r2, 0)"));
    let mut ordered = 0;
    for _ in 0..1000 {
        let par = random_params(&mut rng);
        let d = characteristic_constants(&par).unwrap().d;
        if d[3] * d[6] < d[4] * d[5] {
            ordered += 1;
        }
    }
    c.check(ordered == 1000, format!("D4·D7 < D5·D6 on {ordered}/1000 draws"));
    let took = start.elapsed();
    c.check(took <= Duration::from_secs(30), format!("root lemma checks took {took:.2?} (limit 30s)"));
    (c.ok, c.summary("root count and ordering hold on every draw"))
}

fn criterion5() -> (bool, String) {
    let mut c = Checks::new();
    let e = econ(0.06);
    let honest_frontier = net_profit_frontier_honest(6.0, e.reward(), e.network_power());
    c.check((honest_frontier - 0.065).abs() <= 1e-3, format!("protocol frontier {honest_frontier:.6}"));
    let f1 = frontier_segment1(0.1, 0.5, 6.0, &e);
    c.check((f1 - 0.043).abs() <= 1e-3, format!("segment 1 frontier {f1:.6}"));
    let f2 = frontier_segment2(0.1, 6.0, &e);
    c.check((f2 - 0.071).abs() <= 1e-3, format!("segment 2 frontier {f2:.6}"));
    let par = params(0.06, 1.0, 1e6);
    let cc = characteristic_constants(&par).unwrap().c_const;
    let drift = par.honest_drift();
    let rel = (cc / par.t() - drift).abs() / drift.abs();
    c.check(rel <= 1e-4, format!("q=1: C/t = {:.6}, pλb − c = {drift:.6}, relative gap {rel:.2e}", cc / par.t()));
    (c.ok, c.summary("frontiers 0.065 / 0.043 / 0.071 and the q=1 drift limit hold"))
}

fn criterion6() -> (bool, String) {
    let mut c = Checks::new();
    let par = params(0.06, 1.0, 1e9);
    let theta = honest::lundberg_theta(&par).unwrap();
    let rho = honest::exp_horizon_rho(&par).unwrap();
    let rel = (rho + theta).abs() / theta;
    c.check(rel <= 1e-9, format!("|ρ*(1e9) + θ*| / θ* = {rel:.3e} (θ* = {theta:.9e})"));

    let mut worst = f64::NEG_INFINITY;
    for t in [6.0, 24.0, 168.0, 336.0] {
        let pt = params(0.06, 1.0, t);
        for i in 0..=300 {
            let u = 1_000.0 * i as f64;
            let gap = honest::ruin_prob_exp_horizon(&pt, u).unwrap() - honest::ruin_prob_infinite(&pt, u);
            worst = worst.max(gap);
        }
    }
    c.check(worst <= 1e-15, format!("ψ̂(u,t) − ψ(u) ≤ {worst:.2e} over u ≤ 300k, t ∈ {{6, 24, 168, 336}}"));

    let pf = params(0.04, 0.5, 6.0);
    let sol = CharacteristicSolution::solve(&pf).unwrap();
    let mut worst = f64::INFINITY;
    for i in 0..=200 {
        let u = 1_000.0 * i as f64;
        worst = worst.min(honest::value_exp_horizon(&pf, u).unwrap() - sol.value(u));
    }
    c.check(worst >= -1e-9, format!("min Ṽ(u,t) − Ṽ₀(u,t) = {worst:.3e} over u ≤ 200k"));
    (c.ok, c.summary("horizon limit and orderings hold"))
}

fn col<'a>(t: &'a Table, name: &str) -> &'a [f64] {
    &t.column(name).unwrap_or_else(|| panic!("{}: no column {name}", t.id)).values
}

fn nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + 1e-12)
}

fn criterion7() -> (bool, String) {
    let mut c = Checks::new();
    let opts = FigureOptions::default();
    let fig = |id: FigureId| generate(id, &opts).unwrap();

    // fig2a: staircase.
    let t = fig(FigureId::Fig2a);
    let us = &t.x.values;
    for name in ["psi_det", "psi_inf", "psi_exp"] {
        c.check(nonincreasing(col(&t, name)), format!("fig2a {name} nonincreasing"));
    }
    let par = params(0.06, 1.0, 6.0);
    let jumps: Vec<f64> = (0..)
        .map(|n| par.c() * 6.0 - par.b() * n as f64)
        .take_while(|&u| u > 0.0)
        .filter(|&u| u < us[us.len() - 1])
        .collect();
    let psi = col(&t, "psi_det");
    let mut drops: Vec<(f64, usize)> = psi.windows(2).enumerate().map(|(i, w)| (w[0] - w[1], i)).collect();
    drops.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut biggest: Vec<usize> = drops[..jumps.len()].iter().map(|d| d.1).collect();
    biggest.sort_unstable();
    let mut expected: Vec<usize> = jumps
        .iter()
        .map(|&u| us.windows(2).position(|w| w[0] <= u && u < w[1]).unwrap())
        .collect();
    expected.sort_unstable();
    c.check(
        biggest == expected,
        format!("fig2a largest drops at grid cells {biggest:?}, expected cells {expected:?} (u = ct − bn = {jumps:.0?})"),
    );

    // fig2b: exponential below deterministic, both below target, exact
    // target once ruin within t is impossible.
    let t = fig(FigureId::Fig2b);
    let (det, exp, target) = (col(&t, "profit_det"), col(&t, "profit_exp"), col(&t, "target"));
    let ordered = (1..t.len()).all(|i| exp[i] <= det[i] + 1e-9 && det[i] <= target[i] + 1e-6);
    c.check(ordered, "fig2b profit_exp ≤ profit_det ≤ target");
    let ct = par.c() * 6.0;
    let flat = (0..t.len()).filter(|&i| t.x.values[i] >= ct).all(|i| (det[i] - target[i]).abs() <= 1e-6 * target[i]);
    c.check(flat, "fig2b profit_det equals the target for u ≥ ct");

    // fig5: protocol above withholding.
    let t = fig(FigureId::Fig5a);
    let (h, s) = (col(&t, "psi_exp_honest"), col(&t, "psi_exp_selfish"));
    c.check(nonincreasing(h) && nonincreasing(s), "fig5a ruin curves nonincreasing");
    c.check((1..t.len()).all(|i| s[i] >= h[i]), "fig5a withholding ruin above protocol ruin");
    let t = fig(FigureId::Fig5b);
    let (h, s) = (col(&t, "profit_exp_honest"), col(&t, "profit_exp_selfish"));
    c.check((0..t.len()).all(|i| h[i] >= s[i] - 1e-9), "fig5b protocol profit above withholding profit");

    // fig6: frontier rises with connectivity and meets the protocol
    // frontier at full hashrate.
    let t = fig(FigureId::Fig6);
    let honest_f = col(&t, "frontier_honest")[0];
    let qs = ["frontier_q0.25", "frontier_q0.5", "frontier_q0.75", "frontier_q1"];
    let rising = (0..t.len()).all(|i| qs.windows(2).all(|w| col(&t, w[0])[i] <= col(&t, w[1])[i] + 1e-15));
    c.check(rising, "fig6 frontier increases with q");
    let below = qs.iter().all(|q| col(&t, q).iter().all(|&f| f <= honest_f + 1e-12));
    c.check(below, "fig6 frontiers below the protocol frontier");
    let last = t.len() - 1;
    let meets = qs.iter().all(|q| (col(&t, q)[last] - honest_f).abs() <= 0.02 * honest_f);
    c.check(meets, "fig6 frontiers approach the protocol frontier as p → 1");

    // fig8: segment frontiers.
    let t = fig(FigureId::Fig8a);
    let f1 = col(&t, "frontier_segment1");
    let honest_f = col(&t, "frontier_honest")[0];
    c.check(f1.iter().all(|&f| f <= honest_f + 1e-12), "fig8a segment 1 frontier below protocol frontier");
    c.check((f1[f1.len() - 1] - honest_f).abs() <= 0.02 * honest_f, "fig8a meets protocol frontier as p → 1");
    let t = fig(FigureId::Fig8b);
    let f2 = col(&t, "frontier_segment2");
    c.check(f2.iter().all(|&f| f >= honest_f - 1e-12), "fig8b segment 2 frontier above protocol frontier");
    let imax = f2.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    c.check(imax > 0 && imax < f2.len() - 1, format!("fig8b interior maximum at p = {:.3}", t.x.values[imax]));

    // fig9: two segments.
    let nine = [
        FigureId::Fig9a,
        FigureId::Fig9b,
        FigureId::Fig9c,
        FigureId::Fig9d,
        FigureId::Fig9e,
        FigureId::Fig9f,
    ];
    for id in nine {
        let t = fig(id);
        let (h, s, s2) = (col(&t, "profit_honest"), col(&t, "profit_selfish"), col(&t, "segment2_profit_selfish"));
        let end = t.len() - 1;
        let (he, se, s2e) = (h[end], s[end], s2[end]);
        let large = format!("at u = {:.0}: protocol {he:.0}, withholding {se:.0}", t.x.values[end]);
        match id {
            FigureId::Fig9a | FigureId::Fig9b => c.check(he > se, format!("{id} protocol above withholding {large}")),
            FigureId::Fig9c => {
                c.check(he > se, format!("{id} protocol plateau above withholding plateau {large}"));
                let low = (1..t.len()).find(|&i| s[i] > h[i]).map(|i| t.x.values[i]);
                c.check(low.is_some(), format!("{id} withholding ahead at some lower wealth (first u: {low:?})"));
            }
            FigureId::Fig9d => {
                c.check(he < 0.0 && se > 0.0, format!("{id} sign crossover: protocol < 0 < withholding {large}"));
                println!(
                    "    [info] {id} segment-2-only withholding gain at that u: {s2e:.0} (sign {})",
                    if s2e > 0.0 { "+" } else { "-" }
                );
            }
            _ => c.check(se > he, format!("{id} withholding mitigates the loss {large}")),
        }
    }
    (c.ok, c.summary("all shape checks hold"))
}

fn criterion8() -> (bool, String) {
    let mut c = Checks::new();
    let cases = [
        (Quantity::new(Miner::Honest, Functional::Value, HorizonKind::Exponential), 0.06, Empty),
        (Quantity::new(Miner::Honest, Functional::Ruin, HorizonKind::Deterministic), 0.06, Empty),
        (Quantity::new(Miner::Selfish, Functional::Ruin, HorizonKind::Exponential), 0.04, Fork),
    ];
    for (q, price, z) in cases {
        let par = params(price, 0.5, 6.0).with_u(41_000.0).unwrap();
        let runs: Vec<_> = [1, 4, 16]
            .into_iter()
            .map(|w| with_workers(w, || estimate(q, &par, z, 50_000, 8).unwrap()).unwrap())
            .collect();
        let same = runs
            .iter()
            .all(|r| r.mean.to_bits() == runs[0].mean.to_bits() && r.stderr.to_bits() == runs[0].stderr.to_bits());
        c.check(same, format!("{q}: mean {:.17e} for 1, 4, 16 workers", runs[0].mean));
    }
    (c.ok, c.summary("bit-identical estimates for 1, 4 and 16 workers"))
}

type Criterion = fn() -> (bool, String);

#[test]
fn acceptance_criteria() {
    let mut report = Report {
        lines: Vec::new(),
        failed: Vec::new(),
    };
    let criteria: [(&str, Criterion); 8] = [
        ("protocol Monte-Carlo battery", criterion1),
        ("withholding Monte-Carlo battery", criterion2),
        ("residual suites", criterion3),
        ("root lemma", criterion4),
        ("constants", criterion5),
        ("limit consistency", criterion6),
        ("figure shapes", criterion7),
        ("reproducibility", criterion8),
    ];
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        println!("criterion {}: {name}", i + 1);
        let (ok, detail) = f();
        report.record(i + 1, name, ok, detail);
    }
    println!("\nsummary:");
    for line in &report.lines {
        println!("{line}");
    }
    assert!(report.failed.is_empty(), "failed criteria: {:?}", report.failed);
}
