// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use powerbin_core::binaries::{
    nth_order_binary_price, power_binary_price, power_standard_price, second_order_binary_price,
    PowerBinarySpec,
};
use powerbin_core::gaussian::{binorm_cdf, markov_correlation, mvn_cdf, norm_cdf, CorrelationStructure};
use powerbin_core::normdist::{normdist_price, NormDistPayoffSpec};
use powerbin_core::oracles::{
    greens_price, mc_price, nested_greens_price, quad_price, McConfig, QuadratureConfig,
};
use powerbin_core::oracles::greens::BinaryChain;
use powerbin_core::products::{
    continuous_geo_asian_floating_price_with, convergence_study, discrete_geo_asian_fixed_price,
    discrete_geo_asian_floating_price_with, savings_plan_price, ContinuousFloatingReading, Denominator,
    DriftSign, FloatingReading, GeoAsianFixedSpec, GeoAsianFloatingSpec, SavingsPlanSpec, SigmaPower,
    SpotLegDrift, StudyProduct,
};
use powerbin_core::{mu, ContractSpec, FixedObservations, MarketParams, MonitoringSchedule, SignIndicator};

use SignIndicator::{Down, Up};

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
    checks: usize,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            notes: Vec::new(),
            checks: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 8 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn within(&mut self, started: Instant, limit: Duration) {
        let took = started.elapsed();
        self.check(took <= limit, || format!("took {took:?}, limit {limit:?}"));
        self.note(format!("{:.1}s", took.as_secs_f64()));
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn draw_params(rng: &mut ChaCha8Rng) -> MarketParams {
    MarketParams::new(
        rng.random_range(-0.02..0.10),
        rng.random_range(0.0..0.08),
        rng.random_range(0.05..0.6),
    )
    .unwrap()
}

fn draw_sign(rng: &mut ChaCha8Rng) -> SignIndicator {
    if rng.random_bool(0.5) {
        Up
    } else {
        Down
    }
}

// Strictly increasing dates after t, spaced at least 0.05 apart.
fn draw_expiries(rng: &mut ChaCha8Rng, t: f64, n: usize) -> Vec<f64> {
    let mut e = Vec::with_capacity(n);
    let mut last = t;
    for _ in 0..n {
        last += rng.random_range(0.05..0.8);
        e.push(last);
    }
    e
}

fn without(spec: &PowerBinarySpec, i: usize) -> PowerBinarySpec {
    let keep = |v: &[f64]| -> Vec<f64> {
        v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect()
    };
    let signs = spec
        .signs()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, s)| *s)
        .collect();
    PowerBinarySpec::new(spec.alpha(), keep(spec.thresholds()), signs, keep(spec.expiries())).unwrap()
}

fn criterion_reductions() -> Outcome {
    let mut out = Outcome::new();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let p = draw_params(&mut rng);
        let (r, q, s) = (p.r(), p.q(), p.sigma());
        out.check((mu(&p, 0.0) + r).abs() <= 1e-9, || format!("mu(0) at {p:?}"));
        out.check((mu(&p, 1.0) + q).abs() <= 1e-9, || format!("mu(1) at {p:?}"));

        let x: f64 = rng.random_range(50.0..150.0);
        let xi: f64 = rng.random_range(50.0..150.0);
        let t: f64 = rng.random_range(0.0..1.0);
        let big_t: f64 = t + rng.random_range(0.02..3.0);
        let tau = big_t - t;
        let sd = s * tau.sqrt();
        let d2 = ((x / xi).ln() + (r - q - 0.5 * s * s) * tau) / sd;
        let d1 = d2 + sd;
        for sign in [Up, Down] {
            let e = sign.value();
            let cash = PowerBinarySpec::first_order(0.0, xi, sign, big_t).unwrap();
            let v = power_binary_price(x, t, &cash, &p).unwrap().value;
            let want = (-r * tau).exp() * norm_cdf(e * d2).unwrap();
            out.check((v - want).abs() <= 1e-9, || format!("cash binary {v} vs {want}"));
            let asset = PowerBinarySpec::first_order(1.0, xi, sign, big_t).unwrap();
            let v = power_binary_price(x, t, &asset, &p).unwrap().value;
            let want = (-q * tau).exp() * x * norm_cdf(e * d1).unwrap();
            out.check(rel_gap(v, want.max(1e-300)) <= 1e-9 || (v - want).abs() <= 1e-9, || {
                format!("asset binary {v} vs {want}")
            });
        }

        let alpha = rng.random_range(-1.5..2.5);
        let ex = draw_expiries(&mut rng, t, 2);
        let th = vec![rng.random_range(50.0..150.0), rng.random_range(50.0..150.0)];
        let signs = vec![draw_sign(&mut rng), draw_sign(&mut rng)];
        let one = PowerBinarySpec::first_order(alpha, th[0], signs[0], ex[0]).unwrap();
        let a = nth_order_binary_price(x, t, &one, &p).unwrap().value;
        let b = power_binary_price(x, t, &one, &p).unwrap().value;
        out.check(rel_gap(a, b) <= 1e-9 || (a - b).abs() <= 1e-9, || format!("n=1: {a} vs {b}"));

        let two = PowerBinarySpec::new(alpha, th.clone(), signs.clone(), ex.clone()).unwrap();
        let a = nth_order_binary_price(x, t, &two, &p).unwrap().value;
        let b = second_order_binary_price(x, t, &two, &p).unwrap().value;
        // order-2 formula assembled here: e^{mu tau1} x^alpha N2(s0 d0, s1 d1; s0 s1 rho)
        let dd = |xi: f64, tau: f64| {
            ((x / xi).ln() + (r - q - 0.5 * s * s + alpha * s * s) * tau) / (s * tau.sqrt())
        };
        let (t0, t1) = (ex[0] - t, ex[1] - t);
        let (s0, s1) = (signs[0].value(), signs[1].value());
        let n2 = binorm_cdf(s0 * dd(th[0], t0), s1 * dd(th[1], t1), s0 * s1 * (t0 / t1).sqrt()).unwrap();
        let by_hand = (mu(&p, alpha) * t1).exp() * x.powf(alpha) * n2;
        let via_mvn = {
            let d = [s0 * dd(th[0], t0), s1 * dd(th[1], t1)];
            let corr = markov_correlation(t, &ex, &signs).unwrap();
            (mu(&p, alpha) * t1).exp() * x.powf(alpha) * mvn_cdf(&d, &corr, 1e-12).unwrap().value
        };
        let scale = by_hand.abs().max(1.0);
        out.check((a - by_hand).abs() <= 1e-9 * scale, || format!("n=2 nth {a} vs {by_hand}"));
        out.check((b - by_hand).abs() <= 1e-9 * scale, || format!("n=2 second {b} vs {by_hand}"));
        out.check((via_mvn - by_hand).abs() <= 1e-9 * scale, || format!("n=2 mvn {via_mvn} vs {by_hand}"));
    }
    out.within(started, Duration::from_secs(10));
    out
}

fn criterion_parity() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let p = draw_params(&mut rng);
        let x = rng.random_range(50.0..150.0);
        let t = rng.random_range(0.0..1.0);
        let alpha = rng.random_range(-1.5..2.5);
        let ex = draw_expiries(&mut rng, t, 1);
        let xi = rng.random_range(50.0..150.0);
        let std = power_standard_price(x, t, ex[0], alpha, &p).unwrap().value;
        let up = PowerBinarySpec::first_order(alpha, xi, Up, ex[0]).unwrap();
        let dn = PowerBinarySpec::first_order(alpha, xi, Down, ex[0]).unwrap();
        let sum = power_binary_price(x, t, &up, &p).unwrap().value + power_binary_price(x, t, &dn, &p).unwrap().value;
        out.check((sum - std).abs() <= 1e-12 * std.abs().max(1.0), || {
            format!("up+down {sum} vs standard {std}")
        });
    }
    for n in 2..=5 {
        for _ in 0..60 {
            let p = draw_params(&mut rng);
            let x = rng.random_range(50.0..150.0);
            let t = rng.random_range(0.0..0.5);
            let alpha = rng.random_range(-1.0..2.0);
            let ex = draw_expiries(&mut rng, t, n);
            let th: Vec<f64> = (0..n).map(|_| x * rng.random_range(0.8..1.25)).collect();
            let signs: Vec<_> = (0..n).map(|_| draw_sign(&mut rng)).collect();
            let spec = PowerBinarySpec::new(alpha, th, signs, ex.clone()).unwrap();
            let scale = power_standard_price(x, t, ex[n - 1], alpha, &p).unwrap().value.max(1.0);
            for i in 0..n {
                let a = nth_order_binary_price(x, t, &spec.with_sign(i, Up), &p).unwrap().value;
                let b = nth_order_binary_price(x, t, &spec.with_sign(i, Down), &p).unwrap().value;
                let reduced = without(&spec, i);
                let mut rhs = nth_order_binary_price(x, t, &reduced, &p).unwrap().value;
                if i == n - 1 {
                    // the payoff is still paid at the last date
                    rhs *= (mu(&p, alpha) * (ex[n - 1] - ex[n - 2])).exp();
                }
                out.check((a + b - rhs).abs() <= 1e-12 * scale, || {
                    format!("order {n} parity at {i}: {} vs {rhs}", a + b)
                });
            }
        }
    }
    out
}

// V_t + sigma^2 x^2 V_xx / 2 + (r - q) x V_x - r V with fourth-order central
// differences, relative to the largest term.
fn pde_residual(v: &dyn Fn(f64, f64) -> f64, x: f64, t: f64, p: &MarketParams) -> f64 {
    let h = 1e-3 * x;
    let k = 2e-3;
    let f = |i: f64| v(x + i * h, t);
    let g = |i: f64| v(x, t + i * k);
    let v0 = f(0.0);
    let vx = (-f(2.0) + 8.0 * f(1.0) - 8.0 * f(-1.0) + f(-2.0)) / (12.0 * h);
    let vxx = (-f(2.0) + 16.0 * f(1.0) - 30.0 * v0 + 16.0 * f(-1.0) - f(-2.0)) / (12.0 * h * h);
    let vt = (-g(2.0) + 8.0 * g(1.0) - 8.0 * g(-1.0) + g(-2.0)) / (12.0 * k);
    let terms = [
        vt,
        0.5 * p.sigma() * p.sigma() * x * x * vxx,
        (p.r() - p.q()) * x * vx,
        -p.r() * v0,
    ];
    let scale = terms.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    terms.iter().sum::<f64>().abs() / scale
}

fn criterion_pde() -> Outcome {
    let mut out = Outcome::new();
    let started = Instant::now();
    let p = MarketParams::new(0.05, 0.02, 0.25).unwrap();
    let big_t = 1.5;
    let xs: Vec<f64> = (0..25).map(|i| 60.0 * (160.0f64 / 60.0).powf(i as f64 / 24.0)).collect();
    let ts = [0.1, 0.5, 0.9];
    let xi = 100.0;
    let away = |x: f64| (x / xi).ln().abs() > 0.05;
    let mut worst = 0.0f64;
    let mut run = |name: &str, v: &dyn Fn(f64, f64) -> f64, p: &MarketParams, out: &mut Outcome| {
        for &t in &ts {
            for &x in xs.iter().filter(|x| away(**x)) {
                let res = pde_residual(v, x, t, p);
                worst = worst.max(res);
                out.check(res <= 1e-6, || format!("{name} at x={x:.3} t={t}: {res:.2e}"));
            }
        }
    };
    for alpha in [-1.0, 0.0, 1.0, 2.0] {
        run(
            "power standard",
            &|x, t| power_standard_price(x, t, big_t, alpha, &p).unwrap().value,
            &p,
            &mut out,
        );
        for sign in [Up, Down] {
            let spec = PowerBinarySpec::first_order(alpha, xi, sign, big_t).unwrap();
            run(
                "power binary",
                &|x, t| power_binary_price(x, t, &spec, &p).unwrap().value,
                &p,
                &mut out,
            );
        }
    }
    let spec = PowerBinarySpec::new(1.0, vec![xi, 110.0], vec![Up, Down], vec![1.2, big_t]).unwrap();
    run(
        "second-order binary",
        &|x, t| second_order_binary_price(x, t, &spec, &p).unwrap().value,
        &p,
        &mut out,
    );
    let nd = NormDistPayoffSpec::new(0.5, 2.0, 1e4, 0.25, 0.5, 0.3).unwrap();
    run(
        "normdist",
        &|x, t| normdist_price(x, big_t - t, &nd, &p).unwrap().value,
        &p,
        &mut out,
    );
    let plan = SavingsPlanSpec::new(0.05, 0.03, 1.0, big_t, 0.1).unwrap();
    let fx: Vec<f64> = xs.iter().map(|x| x / 100.0).collect();
    let pde = plan.pde_params();
    for &t in &ts {
        for &x in fx.iter().filter(|x| (*x / plan.strike()).ln().abs() > 0.05) {
            let res = pde_residual(&|x, t| savings_plan_price(x, t, &plan).unwrap().value, x, t, &pde);
            worst = worst.max(res);
            out.check(res <= 1e-6, || format!("savings plan at x={x:.4} t={t}: {res:.2e}"));
        }
    }
    out.note(format!("worst residual {worst:.1e}"));
    out.within(started, Duration::from_secs(30));
    out
}

fn criterion_quadrature() -> Outcome {
    let mut out = Outcome::new();
    let started = Instant::now();
    let cfg = QuadratureConfig::new(1e-8, 16, 10.0).unwrap();
    let desk = MarketParams::new(0.05, 0.02, 0.2).unwrap();
    let mut order_one: Vec<(String, ContractSpec, f64, f64)> = Vec::new();
    for alpha in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        order_one.push((
            format!("power standard alpha={alpha}"),
            ContractSpec::PowerStandard {
                market: desk,
                alpha,
                expiry: 1.0,
            },
            100.0,
            0.0,
        ));
        for sign in [Up, Down] {
            for xi in [80.0, 100.0, 125.0] {
                order_one.push((
                    format!("power binary alpha={alpha} {sign:?} xi={xi}"),
                    ContractSpec::PowerBinary {
                        market: desk,
                        spec: PowerBinarySpec::first_order(alpha, xi, sign, 1.0).unwrap(),
                    },
                    100.0,
                    0.25,
                ));
            }
        }
    }
    order_one.push((
        "normdist".into(),
        ContractSpec::NormDist {
            market: MarketParams::new(0.05, 0.01, 0.2).unwrap(),
            spec: NormDistPayoffSpec::new(0.5, 2.0, 1e4, 0.25, 0.5, 0.3).unwrap(),
            expiry: 0.5,
        },
        100.0,
        0.0,
    ));
    order_one.push((
        "savings plan".into(),
        ContractSpec::SavingsPlan {
            spec: SavingsPlanSpec::new(0.05, 0.03, 1.0, 1.0, 0.1).unwrap(),
        },
        1.0,
        0.0,
    ));
    let mut worst_one = 0.0f64;
    for (name, c, x, t) in &order_one {
        let closed = c.price(*x, *t).unwrap().value;
        match quad_price(c, *x, *t, &cfg) {
            Ok(q) => {
                let g = rel_gap(closed, q.value);
                worst_one = worst_one.max(g);
                out.check(g <= 10.0 * cfg.rel_tol, || format!("{name}: {closed} vs {} ({g:.1e})", q.value));
            }
            Err(e) => out.check(false, || format!("{name}: {e}")),
        }
    }
    // direct use of greens_price on the power binary identity
    let p = MarketParams::new(0.05, 0.02, 0.2).unwrap();
    let q = greens_price(|z| if z > 100.0 { z * z } else { 0.0 }, &[100.0], 100.0, 1.0, &p, &cfg).unwrap();
    let closed = power_binary_price(100.0, 0.0, &PowerBinarySpec::first_order(2.0, 100.0, Up, 1.0).unwrap(), &p)
        .unwrap()
        .value;
    out.check(rel_gap(closed, q.value) <= 1e-8, || format!("z^2 1(z>x): {closed} vs {}", q.value));

    let mut worst_nested = 0.0f64;
    let nested = QuadratureConfig::new(1e-7, 16, 10.0).unwrap();
    let zero = MarketParams::new(0.05, 0.0, 0.2).unwrap();
    let second = PowerBinarySpec::new(0.0, vec![95.0, 105.0], vec![Up, Up], vec![0.5, 1.0]).unwrap();
    let mut pairs: Vec<(String, f64, f64)> = Vec::new();
    let v = second_order_binary_price(100.0, 0.0, &second, &zero).unwrap().value;
    let q = nested_greens_price(&BinaryChain { spec: &second }, 100.0, 0.0, &zero, &nested).unwrap().value;
    pairs.push(("second-order binary".into(), v, q));
    for (alpha, signs) in [(1.0, [Up, Down]), (2.0, [Down, Up]), (-1.0, [Down, Down])] {
        let s = PowerBinarySpec::new(alpha, vec![98.0, 103.0], signs.to_vec(), vec![0.4, 1.1]).unwrap();
        let v = second_order_binary_price(100.0, 0.1, &s, &desk).unwrap().value;
        let q = nested_greens_price(&BinaryChain { spec: &s }, 100.0, 0.1, &desk, &nested).unwrap().value;
        pairs.push((format!("second-order alpha={alpha} {signs:?}"), v, q));
    }
    for n in 2..=4 {
        for (x, t, fixings, strike, params) in [
            (100.0, 0.0, vec![100.0], 100.0, zero),
            (97.0, 0.2, vec![100.0], 95.0, desk),
        ] {
            let schedule = MonitoringSchedule::equally_spaced(n, 1.0).unwrap();
            let fixings = FixedObservations::new(fixings).unwrap();
            let fixed = ContractSpec::GeoAsianFixed {
                market: params,
                spec: GeoAsianFixedSpec::new(schedule.clone(), strike, fixings.clone()).unwrap(),
            };
            let floating = ContractSpec::GeoAsianFloating {
                market: params,
                spec: GeoAsianFloatingSpec::new(schedule, fixings).unwrap(),
            };
            for c in [fixed, floating] {
                let v = c.price(x, t).unwrap().value;
                let q = quad_price(&c, x, t, &nested).unwrap().value;
                pairs.push((format!("{} n={n} t={t}", c.kind_name()), v, q));
            }
        }
    }
    for (name, v, q) in &pairs {
        let g = rel_gap(*v, *q);
        worst_nested = worst_nested.max(g);
        out.check(g <= 1e-5, || format!("{name}: {v} vs {q} ({g:.1e})"));
    }
    out.note(format!(
        "{} order-1 (worst {worst_one:.1e}), {} nested (worst {worst_nested:.1e})",
        order_one.len() + 1,
        pairs.len()
    ));
    out.within(started, Duration::from_secs(120));
    out
}

struct McCase {
    name: String,
    contract: ContractSpec,
    x: f64,
    t: f64,
}

fn mc_cases() -> Vec<McCase> {
    let desk = MarketParams::new(0.05, 0.02, 0.2).unwrap();
    let zero = MarketParams::new(0.05, 0.0, 0.2).unwrap();
    let sched4 = MonitoringSchedule::equally_spaced(4, 1.0).unwrap();
    let first = FixedObservations::new(vec![100.0]).unwrap();
    let mut cases = vec![
        McCase {
            name: "power standard alpha=2".into(),
            contract: ContractSpec::PowerStandard {
                market: zero,
                alpha: 2.0,
                expiry: 1.0,
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "asset binary".into(),
            contract: ContractSpec::PowerBinary {
                market: desk,
                spec: PowerBinarySpec::first_order(1.0, 100.0, Up, 0.5).unwrap(),
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "cash binary down".into(),
            contract: ContractSpec::PowerBinary {
                market: desk,
                spec: PowerBinarySpec::first_order(0.0, 95.0, Down, 1.0).unwrap(),
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "second-order binary".into(),
            contract: ContractSpec::NthBinary {
                market: zero,
                spec: PowerBinarySpec::new(0.0, vec![95.0, 105.0], vec![Up, Up], vec![0.5, 1.0]).unwrap(),
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "third-order binary".into(),
            contract: ContractSpec::NthBinary {
                market: zero,
                spec: PowerBinarySpec::new(0.0, vec![100.0; 3], vec![Up; 3], vec![1.0 / 3.0, 2.0 / 3.0, 1.0])
                    .unwrap(),
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "fifth-order binary".into(),
            contract: ContractSpec::NthBinary {
                market: desk,
                spec: PowerBinarySpec::new(
                    1.5,
                    vec![90.0, 105.0, 95.0, 100.0, 110.0],
                    vec![Up, Down, Up, Up, Down],
                    vec![0.2, 0.4, 0.7, 0.9, 1.2],
                )
                .unwrap(),
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "normdist".into(),
            contract: ContractSpec::NormDist {
                market: MarketParams::new(0.05, 0.01, 0.2).unwrap(),
                spec: NormDistPayoffSpec::new(0.5, 2.0, 1e4, 0.25, 0.5, 0.3).unwrap(),
                expiry: 0.5,
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "savings plan".into(),
            contract: ContractSpec::SavingsPlan {
                spec: SavingsPlanSpec::new(0.05, 0.03, 1.0, 1.0, 0.1).unwrap(),
            },
            x: 1.0,
            t: 0.0,
        },
        McCase {
            name: "geo asian fixed n=4".into(),
            contract: ContractSpec::GeoAsianFixed {
                market: zero,
                spec: GeoAsianFixedSpec::new(sched4.clone(), 100.0, first.clone()).unwrap(),
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "geo asian fixed n=6 mid-life".into(),
            contract: ContractSpec::GeoAsianFixed {
                market: desk,
                spec: GeoAsianFixedSpec::new(
                    MonitoringSchedule::equally_spaced(6, 1.0).unwrap(),
                    98.0,
                    FixedObservations::new(vec![100.0, 103.0]).unwrap(),
                )
                .unwrap(),
            },
            x: 101.0,
            t: 0.3,
        },
        McCase {
            name: "geo asian floating n=4".into(),
            contract: ContractSpec::GeoAsianFloating {
                market: desk,
                spec: GeoAsianFloatingSpec::new(sched4, first).unwrap(),
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "cont asian fixed".into(),
            contract: ContractSpec::ContAsianFixed {
                market: zero,
                strike: 100.0,
                expiry: 1.0,
                j: 1.0,
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "cont asian floating q=0".into(),
            contract: ContractSpec::ContAsianFloating {
                market: zero,
                expiry: 1.0,
                j: 1.0,
            },
            x: 100.0,
            t: 0.0,
        },
        McCase {
            name: "cont asian floating mid-life".into(),
            contract: ContractSpec::ContAsianFloating {
                market: desk,
                expiry: 1.0,
                j: 95.0,
            },
            x: 100.0,
            t: 0.5,
        },
    ];
    cases.push(McCase {
        name: "cont asian fixed mid-life".into(),
        contract: ContractSpec::ContAsianFixed {
            market: desk,
            strike: 98.0,
            expiry: 1.0,
            j: 95.0,
        },
        x: 100.0,
        t: 0.5,
    });
    cases
}

fn mc_config() -> McConfig {
    McConfig::new(1_000_000, 0, true, 1024).unwrap()
}

fn criterion_monte_carlo() -> Outcome {
    let mut out = Outcome::new();
    let started = Instant::now();
    let cfg = mc_config();
    let mut worst = 0.0f64;
    for case in mc_cases() {
        let closed = case.contract.price(case.x, case.t).unwrap().value;
        let mc = mc_price(&case.contract, case.x, case.t, &cfg).unwrap();
        let se = mc.stderr.unwrap();
        let z = (closed - mc.value).abs() / se;
        worst = worst.max(z);
        out.check(z <= 3.0, || {
            format!("{}: closed {closed} mc {} se {se:.2e} ({z:.2} SE)", case.name, mc.value)
        });
    }
    out.note(format!("worst {worst:.2} SE"));
    out.within(started, Duration::from_secs(300));
    out
}

fn criterion_convergence() -> Outcome {
    let mut out = Outcome::new();
    let started = Instant::now();
    let p = MarketParams::new(0.05, 0.0, 0.2).unwrap();
    let ladder = [8, 16, 32, 64, 128];
    for (name, product) in [
        ("fixed", StudyProduct::Fixed { strike: 100.0 }),
        ("floating", StudyProduct::Floating),
    ] {
        let rows = convergence_study(product, &ladder, 100.0, 1.0, &p).unwrap();
        for w in rows.windows(2) {
            out.check(w[1].abs_error < w[0].abs_error, || {
                format!("{name}: error rose from n={} to n={}", w[0].n, w[1].n)
            });
        }
        for r in &rows[1..] {
            let q = r.error_ratio_vs_prev.unwrap();
            out.check((0.3..=0.7).contains(&q), || format!("{name} n={}: ratio {q}", r.n));
        }
        let last = rows.last().unwrap();
        out.check(last.rel_error < 1e-2, || format!("{name}: rel error {} at n=128", last.rel_error));
        out.note(format!("{name} rel error at 128 {:.1e}", last.rel_error));
    }
    out.within(started, Duration::from_secs(60));
    out
}

fn criterion_gaussian() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..400 {
        let n = rng.random_range(1..=10);
        let t = rng.random_range(0.0..1.0);
        let ex = draw_expiries(&mut rng, t, n);
        let corr = markov_correlation(t, &ex, &vec![Up; n]).unwrap();
        let (a, r) = (corr.a_matrix(), corr.rho_matrix());
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|k| a[i][k] * r[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                out.check((v - want).abs() <= 1e-12, || format!("(A R)[{i}][{j}] = {v} for n={n}"));
            }
        }
    }
    let mut rho = -0.999;
    while rho <= 0.999 {
        let v = binorm_cdf(0.0, 0.0, rho).unwrap();
        let want = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
        out.check((v - want).abs() <= 1e-10, || format!("orthant at rho={rho}: {v} vs {want}"));
        rho += 0.001;
    }
    for _ in 0..1000 {
        let a = rng.random_range(-4.0..4.0);
        let b = rng.random_range(-4.0..4.0);
        let rho: f64 = rng.random_range(-0.99..0.99);
        let corr = CorrelationStructure::from_matrix(&[vec![1.0, rho], vec![rho, 1.0]]).unwrap();
        let m = mvn_cdf(&[a, b], &corr, 1e-10).unwrap().value;
        let w = binorm_cdf(a, b, rho).unwrap();
        out.check((m - w).abs() <= 1e-9, || format!("mvn n=2 ({a},{b},{rho}): {m} vs {w}"));
    }
    out
}

// Pricing the (k+1)-step fixed-strike Asian by carrying the k-step closed form
// back one interval as two normal-distribution payoffs.
fn criterion_recursion() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = 0;
    for _ in 0..100 {
        let p = draw_params(&mut rng);
        let n = rng.random_range(3..=5);
        let mut times = vec![0.0];
        for _ in 1..n {
            let last = *times.last().unwrap();
            times.push(last + rng.random_range(0.05..0.6));
        }
        let schedule = MonitoringSchedule::new(times.clone()).unwrap();
        let strike: f64 = rng.random_range(80.0..120.0);
        let nf = n as f64;
        // k future dates remain after T_{n-k} (1-based), i.e. after times[n-k-1]
        for k in 1..=n - 2 {
            let m = n - k - 1;
            let fixings: Vec<f64> = (0..m).map(|_| rng.random_range(80.0..120.0)).collect();
            let log_p: f64 = fixings.iter().map(|f| f.ln()).sum();
            let anchor = times[n - k - 1];
            let (mut a, mut b, mut theta) = (0.0, 0.0, 0.0);
            for i in 1..=k {
                let len = times[n - i] - times[n - i - 1];
                let w = i as f64;
                a += w * len;
                b += w * w * len;
                theta += mu(&p, w / nf) * len;
            }
            let k_strike = (nf * strike.ln() - log_p).exp();
            let avg = NormDistPayoffSpec::new((k as f64 + 1.0) / nf, k as f64 + 1.0, k_strike, b / (nf * a), a, b)
                .unwrap();
            let cash = NormDistPayoffSpec::new(0.0, k as f64 + 1.0, k_strike, 0.0, a, b).unwrap();
            let c_avg = (log_p / nf + theta).exp();
            let c_cash = strike * (-p.r() * (times[n - 1] - anchor)).exp();

            // the decomposition must reproduce the k-step form on its own date
            let x_at = rng.random_range(80.0..120.0);
            let mut with_x = fixings.clone();
            with_x.push(x_at);
            let k_spec = GeoAsianFixedSpec::new(schedule.clone(), strike, FixedObservations::new(with_x).unwrap())
                .unwrap();
            let direct = discrete_geo_asian_fixed_price(x_at, anchor, &k_spec, &p).unwrap().value;
            let split = c_avg * normdist_price(x_at, 0.0, &avg, &p).unwrap().value
                - c_cash * normdist_price(x_at, 0.0, &cash, &p).unwrap().value;
            let scale = direct.abs().max(1.0);
            out.check((direct - split).abs() <= 1e-9 * scale, || {
                format!("k={k} n={n}: k-step {direct} vs decomposition {split}")
            });

            let t = times[m - 1] + rng.random_range(0.0..1.0) * (anchor - times[m - 1]);
            let x = rng.random_range(80.0..120.0);
            let tau = anchor - t;
            let carried = c_avg * normdist_price(x, tau, &avg, &p).unwrap().value
                - c_cash * normdist_price(x, tau, &cash, &p).unwrap().value;
            let spec = GeoAsianFixedSpec::new(schedule.clone(), strike, FixedObservations::new(fixings).unwrap())
                .unwrap();
            let closed = discrete_geo_asian_fixed_price(x, t, &spec, &p).unwrap().value;
            let scale = closed.abs().max(1.0);
            out.check((closed - carried).abs() <= 1e-9 * scale, || {
                format!("k={k} n={n}: (k+1)-step {closed} vs carried {carried}")
            });
            cases += 1;
        }
    }
    out.note(format!("{cases} steps"));
    out
}

fn criterion_errata() -> Outcome {
    let mut out = Outcome::new();
    let started = Instant::now();
    let cfg = mc_config();
    let desk = MarketParams::new(0.05, 0.02, 0.2).unwrap();

    let schedule = MonitoringSchedule::equally_spaced(4, 1.0).unwrap();
    let spec = GeoAsianFloatingSpec::new(schedule, FixedObservations::new(vec![100.0]).unwrap()).unwrap();
    let mc = mc_price(
        &ContractSpec::GeoAsianFloating {
            market: desk,
            spec: spec.clone(),
        },
        100.0,
        0.0,
        &cfg,
    )
    .unwrap();
    let se = mc.stderr.unwrap();
    let zf = |denominator, spot_leg_drift| {
        let reading = FloatingReading {
            denominator,
            spot_leg_drift,
        };
        let v = discrete_geo_asian_floating_price_with(100.0, 0.0, &spec, &desk, reading).unwrap().value;
        (v - mc.value).abs() / se
    };
    for (den, drift, accept) in [
        (Denominator::NMinusOne, SpotLegDrift::Corrected, true),
        (Denominator::N, SpotLegDrift::Corrected, true),
        (Denominator::NMinusOne, SpotLegDrift::AsPrinted, false),
        (Denominator::N, SpotLegDrift::AsPrinted, false),
    ] {
        let z = zf(den, drift);
        out.check((z <= 3.0) == accept, || {
            format!("discrete floating {den:?}/{drift:?}: {z:.1} SE, expected accept={accept}")
        });
        out.note(format!("{den:?}/{drift:?} {z:.1} SE"));
    }

    for (label, market, j, t) in [
        ("q=0", MarketParams::new(0.05, 0.0, 0.2).unwrap(), 1.0, 0.0),
        ("mid-life", desk, 95.0, 0.5),
    ] {
        let c = ContractSpec::ContAsianFloating {
            market,
            expiry: 1.0,
            j,
        };
        let mc = mc_price(&c, 100.0, t, &cfg).unwrap();
        let se = mc.stderr.unwrap();
        let state = powerbin_core::products::AsianState::new(j, t).unwrap();
        for (power, drift, accept) in [
            (SigmaPower::Two, DriftSign::Plus, true),
            (SigmaPower::Three, DriftSign::Plus, false),
            (SigmaPower::Two, DriftSign::Minus, false),
            (SigmaPower::Three, DriftSign::Minus, false),
        ] {
            let reading = ContinuousFloatingReading {
                sigma_power: power,
                drift,
            };
            let v = continuous_geo_asian_floating_price_with(100.0, &state, 1.0, &market, reading)
                .unwrap()
                .value;
            let z = (v - mc.value).abs() / se;
            out.check((z <= 3.0) == accept, || {
                format!("continuous floating {label} {power:?}/{drift:?}: {z:.1} SE, expected accept={accept}")
            });
            out.note(format!("{label} {power:?}/{drift:?} {z:.1} SE"));
        }
    }
    out.within(started, Duration::from_secs(300));
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("reduction identities", criterion_reductions),
        ("parity relations", criterion_parity),
        ("PDE residuals", criterion_pde),
        ("quadrature agreement", criterion_quadrature),
        ("Monte Carlo agreement", criterion_monte_carlo),
        ("discrete-to-continuous convergence", criterion_convergence),
        ("Gaussian kernel", criterion_gaussian),
        ("recursion consistency", criterion_recursion),
        ("floating-strike readings pinned by Monte Carlo", criterion_errata),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let status = if out.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut detail = format!("{} checks", out.checks);
        if !out.notes.is_empty() {
            detail = format!("{detail}; {}", out.notes.join(", "));
        }
        println!("{status} {}: {name} ({detail})", i + 1);
        if !out.failures.is_empty() {
            failed += 1;
            for f in out.failures.iter().filter(|f| !f.is_empty()) {
                println!("    {f}");
            }
            let hidden = out.failures.iter().filter(|f| f.is_empty()).count();
            if hidden > 0 {
                println!("    ... and {hidden} more");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
