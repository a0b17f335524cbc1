//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use affctl::chain_sets::{
    build_chain, certificate_is_consistent, chain_set, escape_certificate, stress_certificate,
    validate_chain,
};
use affctl::control_sets::{control_set_at, g0_region, sweep};
use affctl::dynamics::{f0_pow, solution, step, step_back, trajectory, weighted_sum};
use affctl::extremal::{drive, envelope_lines};
use affctl::reachability_oracle::{approx_controllability_check, limit_interval, reach_trace};
use affctl::{
    ChainDescriptor, ControlWord, EscapeCertificate, FiberShape, GroupElement, State, System,
    SystemSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type RegimePicker = (&'static str, fn(&mut ChaCha8Rng) -> f64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`
fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn pt(x: f64, y: f64) -> State {
    GroupElement::new(x, y).unwrap()
}

fn spec_system(a: f64, d: f64, g: &[f64], u_min: f64, u_max: f64) -> System {
    System::from_spec(&SystemSpec {
        a,
        d,
        g_coeffs: g.to_vec(),
        u_min,
        u_max,
    })
    .unwrap()
}

fn random_system(rng: &mut ChaCha8Rng, d: f64) -> System {
    let degree = rng.gen_range(1..=3);
    let mut g: Vec<f64> = (0..degree).map(|_| rng.gen_range(-2.0..2.0)).collect();
    // keep the drive range non-degenerate
    if g[0].abs() < 0.2 {
        g[0] = 0.2f64.copysign(g[0]);
    }
    spec_system(
        rng.gen_range(-2.0..2.0),
        d,
        &g,
        -rng.gen_range(0.1..2.0),
        rng.gen_range(0.1..2.0),
    )
}

fn random_word(rng: &mut ChaCha8Rng, sys: &System, len: usize) -> ControlWord {
    ControlWord::new(
        (0..len)
            .map(|_| rng.gen_range(sys.u_min()..=sys.u_max()))
            .collect(),
    )
}

fn random_d(rng: &mut ChaCha8Rng, i: usize) -> f64 {
    match i % 5 {
        0 => rng.gen_range(0.0..0.99),
        1 => rng.gen_range(-0.99..0.0),
        2 => 0.0,
        3 => 1.0,
        _ => -1.0,
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> State {
    pt(rng.gen_range(0.1..10.0), rng.gen_range(-10.0..10.0))
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 1200;
    let (mut group_err, mut translation_err) = (0.0f64, 0.0f64);
    for i in 0..n {
        let (g1, g2, g3) = (
            random_state(&mut rng),
            random_state(&mut rng),
            random_state(&mut rng),
        );
        let left = g1.multiply(&g2).multiply(&g3);
        let right = g1.multiply(&g2.multiply(&g3));
        let e = GroupElement::identity();
        let inv = g1.multiply(&g1.inverse());
        for (p, q) in [
            (left, right),
            (g1.multiply(&e), g1),
            (e.multiply(&g1), g1),
            (inv, e),
        ] {
            group_err = group_err
                .max(rel_err(p.x(), q.x()))
                .max(rel_err(p.y(), q.y()));
        }

        let d = random_d(&mut rng, i);
        let sys = random_system(&mut rng, d);
        let k = rng.gen_range(0..=30);
        let w = random_word(&mut rng, &sys, k);
        let g = pt(rng.gen_range(0.1..4.0), rng.gen_range(-5.0..5.0));
        let lhs = solution(&sys, &g, &w, k as i64).unwrap();
        let rhs = solution(&sys, &e, &w, k as i64)
            .unwrap()
            .multiply(&f0_pow(&sys, &g, k));
        translation_err = translation_err
            .max(rel_err(lhs.x(), rhs.x()))
            .max(rel_err(lhs.y(), rhs.y()));
    }
    ensure(group_err <= 1e-12, || {
        format!("group law error {group_err:e}")
    })?;
    ensure(translation_err <= 1e-10, || {
        format!("translation identity error {translation_err:e}")
    })?;
    Ok(format!(
        "{n} instances over all regimes, group err {group_err:.1e}, translation err {translation_err:.1e}"
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 1200;
    let (mut kernel, mut cocycle, mut concat, mut round_trip) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        let d = random_d(&mut rng, i);
        let sys = random_system(&mut rng, d);
        let s = pt(rng.gen_range(0.1..4.0), rng.gen_range(-5.0..5.0));
        let k = rng.gen_range(0..=30);
        let w = random_word(&mut rng, &sys, k);
        let composed = solution(&sys, &s, &w, k as i64).unwrap();
        kernel = kernel.max(rel_err(
            weighted_sum(&sys, s.x(), s.y(), &w, k).unwrap(),
            composed.y(),
        ));

        let (s1, t1) = (rng.gen_range(1..=15), rng.gen_range(1..=15));
        let w1 = random_word(&mut rng, &sys, s1);
        let w2 = random_word(&mut rng, &sys, t1);
        let joined = w1.concat(&w2);
        let whole = solution(&sys, &s, &joined, (s1 + t1) as i64).unwrap();
        let mid = solution(&sys, &s, &joined, s1 as i64).unwrap();
        let shifted = solution(&sys, &mid, &joined.shift(s1).unwrap(), t1 as i64).unwrap();
        cocycle = cocycle.max(rel_err(whole.y(), shifted.y()));
        let chained = solution(
            &sys,
            &solution(&sys, &s, &w1, s1 as i64).unwrap(),
            &w2,
            t1 as i64,
        )
        .unwrap();
        concat = concat.max(rel_err(whole.y(), chained.y()));

        if sys.d() != 0.0 {
            let u = rng.gen_range(sys.u_min()..=sys.u_max());
            let back = step_back(&sys, &step(&sys, &s, u).unwrap(), u).unwrap();
            round_trip = round_trip.max(rel_err(back.y(), s.y()));
        }
    }
    ensure(kernel <= 1e-10, || format!("kernel error {kernel:e}"))?;
    ensure(cocycle <= 1e-10, || format!("cocycle error {cocycle:e}"))?;
    ensure(concat <= 1e-10, || {
        format!("concatenation error {concat:e}")
    })?;
    ensure(round_trip <= 1e-12, || {
        format!("step_back error {round_trip:e}")
    })?;
    Ok(format!(
        "{n} instances, kernel {kernel:.1e}, cocycle {cocycle:.1e}, concat {concat:.1e}, round trip {round_trip:.1e}"
    ))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for (d, expected) in [(0.5, [-2.0, 2.0]), (-0.5, [-2.0, 2.0])] {
        let sys = spec_system(0.0, d, &[1.0], -1.0, 1.0);
        let formula = control_set_at(&sys, 1.0).unwrap().shape.interval().unwrap();
        let limit = limit_interval(&sys, 1.0, 0.0, 1e-12).unwrap();
        ensure(
            formula.lo == expected[0] && formula.hi == expected[1],
            || format!("d = {d}: formula gives {formula}"),
        )?;
        worst = worst.max(formula.hausdorff(&limit));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 240;
    for i in 0..n {
        let d = rng.gen_range(-0.99..0.99);
        let sys = random_system(&mut rng, d);
        let x = rng.gen_range(0.1..4.0);
        let y = rng.gen_range(-10.0..10.0);
        let formula = control_set_at(&sys, x).unwrap().shape.interval().unwrap();
        let limit = limit_interval(&sys, x, y, 1e-12).unwrap();
        let h = formula.hausdorff(&limit);
        ensure(h <= 1e-9, || {
            format!("system {i} (d = {d}, x = {x}): {formula} vs {limit}, hausdorff {h:e}")
        })?;
        worst = worst.max(h);
    }
    Ok(format!(
        "{n} random systems plus 2 worked instances, max hausdorff {worst:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 600;
    let mut negative = 0;
    for i in 0..n {
        let d = if i % 2 == 0 {
            rng.gen_range(0.0..0.99)
        } else {
            rng.gen_range(-0.99..0.0)
        };
        negative += usize::from(d < 0.0);
        let sys = random_system(&mut rng, d);
        let x = rng.gen_range(0.1..4.0);
        let set = control_set_at(&sys, x).unwrap().shape.interval().unwrap();
        // endpoints are the hardest starting points
        let y0 = match i % 4 {
            0 => set.lo,
            1 => set.hi,
            _ => rng.gen_range(set.lo..=set.hi),
        };
        let w = random_word(&mut rng, &sys, 40);
        for (k, s) in trajectory(&sys, &pt(x, y0), &w, 40)
            .unwrap()
            .iter()
            .enumerate()
        {
            ensure(set.contains(s.y(), 1e-9), || {
                format!("d = {d}, x = {x}: step {k} reached {} outside {set}", s.y())
            })?;
        }
    }
    Ok(format!(
        "{n} trajectories of 40 steps ({negative} with d < 0), all inside D_x + 1e-9"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 400;
    let mut worst = 0.0f64;
    for i in 0..n {
        let positive = i % 2 == 0;
        let d = if positive {
            rng.gen_range(0.05..0.99)
        } else {
            rng.gen_range(-0.99..-0.05)
        };
        let sys = random_system(&mut rng, d);
        let x = rng.gen_range(0.1..4.0);
        let u1 = rng.gen_range(sys.u_min()..=sys.u_max());
        let u2 = rng.gen_range(sys.u_min()..=sys.u_max());
        let (p1, p2) = (drive(&sys, u1, x).unwrap(), drive(&sys, u2, x).unwrap());
        let (word, y) = if positive {
            (ControlWord::constant(u1, 1), p1 / (1.0 - d))
        } else {
            (
                ControlWord::alternating(u1, u2, 2),
                (d * p1 + p2) / (1.0 - d * d),
            )
        };
        let start = pt(x, y);
        let back = solution(&sys, &start, &word, -(word.len() as i64)).unwrap();
        let err = (back.y() - y).abs();
        ensure(err <= 1e-10, || {
            format!("d = {d}, x = {x}: returned to {} not {y}", back.y())
        })?;
        worst = worst.max(err);
    }
    Ok(format!(
        "{n} constant / 2-periodic constructions, max return error {worst:.1e}"
    ))
}

fn criterion_6() -> Outcome {
    // dyadic grid: every product below is exact, so the strict test is unambiguous
    let mut checked = 0;
    let mut on_boundary = 0;
    for ai in -8..=8 {
        let a = ai as f64 * 0.25;
        for (g, lo, hi) in [
            (vec![1.0], -0.5, 0.5),
            (vec![1.0], -0.25, 1.0),
            (vec![0.0, 1.0], -1.0, 1.0),
        ] {
            let sys = spec_system(a, 1.0, &g, lo, hi);
            let (g_min, g_max) = if g.len() == 1 {
                (lo, hi)
            } else {
                (0.0, lo.abs().max(hi.abs()).powi(2))
            };
            for xi in 1..=32 {
                let x = xi as f64 / 8.0;
                let m = g_min * x + a * (x - 1.0);
                let big_m = g_max * x + a * (x - 1.0);
                let strict = m < 0.0 && 0.0 < big_m;
                on_boundary += usize::from(m == 0.0 || big_m == 0.0);
                let shape = control_set_at(&sys, x).unwrap().shape;
                ensure((shape == FiberShape::FullLine) == strict, || {
                    format!("a = {a}, g = {g:?}, x = {x}: shape {shape:?} but m = {m}, M = {big_m}")
                })?;
                ensure(
                    shape == FiberShape::FullLine || shape == FiberShape::Absent,
                    || format!("unexpected shape {shape:?}"),
                )?;
                let trace = reach_trace(&sys, x, 0.7, 12).unwrap();
                for row in trace.rows().skip(1) {
                    let (slope_lo, slope_hi) =
                        ((row.lo - 0.7) / row.k as f64, (row.hi - 0.7) / row.k as f64);
                    ensure(
                        (slope_lo - m).abs() <= 1e-9 && (slope_hi - big_m).abs() <= 1e-9,
                        || {
                            format!("a = {a}, x = {x}, k = {}: slopes {slope_lo}, {slope_hi} vs {m}, {big_m}", row.k)
                        },
                    )?;
                }
                checked += 1;
            }
        }
    }
    ensure(on_boundary > 0, || "grid never touched the boundary".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 150;
    for _ in 0..n {
        // g = b1 u + b2 u^2 has closed-form extrema on U
        let (b1, b2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (lo, hi) = (-rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
        let a = rng.gen_range(-2.0..2.0);
        let sys = spec_system(a, 1.0, &[b1, b2], lo, hi);
        let g = |u: f64| b1 * u + b2 * u * u;
        let mut values = vec![g(lo), g(hi)];
        if b2 != 0.0 && (lo..=hi).contains(&(-b1 / (2.0 * b2))) {
            values.push(g(-b1 / (2.0 * b2)));
        }
        let g_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let g_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let expected = (a + g_min) * (a + g_max) > 0.0;
        let region = g0_region(&sys).unwrap();
        ensure(region.bounded == expected, || {
            format!(
                "a = {a}, g = {b1} u + {b2} u^2 on [{lo}, {hi}]: bounded = {}",
                region.bounded
            )
        })?;
    }
    Ok(format!(
        "{checked} grid fibers ({on_boundary} on the boundary), {n} random G0 boundedness checks"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 60;
    let mut fibers = 0;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let sys = random_system(&mut rng, -1.0);
        for _ in 0..4 {
            let x = rng.gen_range(0.1..4.0);
            let y = rng.gen_range(-5.0..5.0);
            let m = sys.extremal().g_min * x + sys.a() * (x - 1.0);
            let big_m = sys.extremal().g_max * x + sys.a() * (x - 1.0);
            let trace = reach_trace(&sys, x, y, 40).unwrap();
            for row in trace.rows().filter(|r| r.k % 2 == 0) {
                let err = ((row.hi - row.lo) - row.k as f64 * (big_m - m)).abs();
                worst = worst.max(err);
                ensure(err <= 1e-9, || {
                    format!("x = {x}, k = {}: width error {err:e}", row.k)
                })?;
            }
            let report = approx_controllability_check(&sys, x, 16, 1e-9).unwrap();
            ensure(report.pass, || format!("x = {x}: {report:?}"))?;
            fibers += 1;
        }
    }
    Ok(format!("{fibers} fibers over {n} systems, max width error {worst:.1e}, all approximately controllable"))
}

fn in_e_point(rng: &mut ChaCha8Rng, sys: &System) -> State {
    let x = match chain_set(sys).unwrap().g0() {
        Some(g0) => {
            let lo = g0.lower.max(0.5);
            let hi = g0.upper.unwrap_or(3.0).min(3.0);
            if lo < hi {
                rng.gen_range(lo..=hi)
            } else {
                1.0
            }
        }
        None => rng.gen_range(0.5..3.0),
    };
    match control_set_at(sys, x).unwrap().shape {
        FiberShape::Bounded { lo, hi } => pt(x, rng.gen_range(lo..=hi)),
        FiberShape::Singleton { value } => pt(x, value),
        // d = 1 boundary fibers carry no control set but are still in E
        FiberShape::FullLine | FiberShape::Absent => pt(x, rng.gen_range(-5.0..5.0)),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pairs = 100;
    let mut built = 0;
    let mut hops = 0;
    let mut mutated = 0;
    let regimes: [RegimePicker; 4] = [
        ("0 <= d < 1", |r| r.gen_range(0.0..0.95)),
        ("-1 < d < 0", |r| r.gen_range(-0.95..0.0)),
        ("d = 1", |_| 1.0),
        ("d = -1", |_| -1.0),
    ];
    for (name, pick_d) in regimes {
        for _ in 0..pairs {
            let d = pick_d(&mut rng);
            let sys = random_system(&mut rng, d);
            let (from, to) = (in_e_point(&mut rng, &sys), in_e_point(&mut rng, &sys));
            for eps in [1.0, 0.1, 0.01] {
                for min_time in [1usize, 5, 20] {
                    let chain = build_chain(&sys, &from, &to, eps, min_time).map_err(|e| {
                        format!("{name}: {from} -> {to}, eps {eps}, k {min_time}: {e}")
                    })?;
                    let report = validate_chain(&sys, &chain).unwrap();
                    ensure(report.pass, || {
                        format!("{name}: chain {from} -> {to} fails: {report:?}")
                    })?;
                    ensure(
                        chain.points[0] == from && *chain.points.last().unwrap() == to,
                        || format!("{name}: endpoints moved"),
                    )?;
                    built += 1;
                    hops += chain.hops();

                    let widest = report.distances.iter().copied().fold(0.0, f64::max);
                    if widest > 0.0 {
                        let shrunk = ChainDescriptor {
                            epsilon: widest,
                            ..chain
                        };
                        let report = validate_chain(&sys, &shrunk).unwrap();
                        ensure(!report.pass, || {
                            format!("{name}: mutated chain still passes")
                        })?;
                        mutated += 1;
                    }
                }
            }
        }
    }
    ensure(mutated >= 100, || {
        format!("only {mutated} chains could be mutated")
    })?;
    Ok(format!("{built} chains ({hops} hops) over 4 regimes all validate; {mutated} mutations all rejected"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let targets = 100;
    let mut hops = 0;
    let mut closest = f64::INFINITY;
    for i in 0..targets {
        let d = if i % 2 == 0 {
            rng.gen_range(0.05..0.95)
        } else {
            rng.gen_range(-0.95..-0.05)
        };
        let sys = random_system(&mut rng, d);
        let x = rng.gen_range(0.3..3.0);
        let fiber = control_set_at(&sys, x).unwrap().shape.interval().unwrap();
        let y = if rng.gen_bool(0.5) {
            fiber.hi + rng.gen_range(0.2..3.0)
        } else {
            fiber.lo - rng.gen_range(0.2..3.0)
        };
        let target = pt(x, y);
        let cert = escape_certificate(&sys, &target, None).map_err(|e| format!("{target}: {e}"))?;

        // distance to the edge via the foot of the perpendicular
        let (upper, lower) = envelope_lines(&sys).unwrap();
        let line = if y > fiber.hi { upper } else { lower };
        let (s, c) = (line.slope, line.intercept);
        let foot_x = (x + s * (y - c)) / (1.0 + s * s);
        let r = (x - foot_x).hypot(y - (s * foot_x + c));
        ensure(rel_err(r, cert.r) <= 1e-12, || {
            format!("{target}: r = {} vs {r}", cert.r)
        })?;
        ensure(cert.delta == cert.r / 4.0, || {
            format!("{target}: delta != r / 4")
        })?;
        let decay = (0..cert.min_time).fold(1.0, |acc: f64, _| acc * d.abs());
        ensure(decay * (cert.delta + cert.eps0) < cert.eps0, || {
            format!("{target}: min_time {} too small", cert.min_time)
        })?;
        ensure(certificate_is_consistent(&sys, &cert), || {
            format!("{target}: inconsistent certificate")
        })?;

        let stress = stress_certificate(&sys, &cert, 100, 50, 9000 + i as u64).unwrap();
        ensure(stress.pass, || format!("{target}: {stress:?}"))?;
        hops += stress.hops_run;
        closest = closest.min(stress.closest_approach / cert.delta);
    }
    Ok(format!(
        "{targets} targets x 100 attempts ({hops} hops), no breach; closest approach {closest:.2} delta"
    ))
}

fn affctl(args: &[&str]) -> (i32, Vec<u8>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_affctl"))
        .args(args)
        .output()
        .expect("run affctl");
    (
        out.status.code().unwrap_or(-1),
        out.stdout,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn csv_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8(bytes.to_vec())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn same_bits(text: &str, value: f64) -> bool {
    text.parse::<f64>()
        .map(|v| v.to_bits() == value.to_bits())
        .unwrap_or(false)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let spec = SystemSpec {
        a: 0.1,
        d: 1.0 / 3.0,
        g_coeffs: vec![0.7, -1.0 / 7.0],
        u_min: -0.9,
        u_max: 1.3,
    };
    let sys = System::from_spec(&spec).unwrap();
    let system = path("system.json");
    std::fs::write(&system, serde_json::to_string(&spec).unwrap()).unwrap();
    let mut checks = 0;

    // describe echoes the system bit-exactly and re-ingests to identical output
    let (code, first, err) = affctl(&["--system", &system, "describe"]);
    ensure(code == 0, || format!("describe exit {code}: {err}"))?;
    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    let echoed: SystemSpec = serde_json::from_value(report["system"].clone()).unwrap();
    ensure(echoed == spec, || format!("describe echoed {echoed:?}"))?;
    let system2 = path("system2.json");
    std::fs::write(&system2, serde_json::to_string(&echoed).unwrap()).unwrap();
    let (_, second, _) = affctl(&["--system", &system2, "describe"]);
    ensure(first == second, || {
        "describe output changed after re-ingest".into()
    })?;
    checks += 2;

    // chain JSON re-ingests bit-exactly and verifies
    let chain_path = path("chain.json");
    let (code, _, err) = affctl(&[
        "--system",
        &system,
        "--out",
        &chain_path,
        "chain",
        "--from",
        "1,0.2",
        "--to",
        "2.5,-0.4",
        "--epsilon",
        "0.05",
        "--min-time",
        "5",
    ]);
    ensure(code == 0, || format!("chain exit {code}: {err}"))?;
    let text = std::fs::read_to_string(&chain_path).unwrap();
    let chain: ChainDescriptor = serde_json::from_str(&text).unwrap();
    let rewritten = serde_json::to_string_pretty(&chain).unwrap() + "\n";
    ensure(rewritten == text, || {
        "chain JSON does not re-serialize identically".into()
    })?;
    let direct = build_chain(&sys, &pt(1.0, 0.2), &pt(2.5, -0.4), 0.05, 5).unwrap();
    ensure(direct == chain, || {
        "CLI chain differs from library chain".into()
    })?;
    let (code, _, err) = affctl(&["--system", &system, "verify", "--chain", &chain_path]);
    ensure(code == 0, || format!("verify exit {code}: {err}"))?;
    let broken = ChainDescriptor {
        epsilon: 1e-300,
        ..chain
    };
    let broken_path = path("broken.json");
    std::fs::write(&broken_path, serde_json::to_string(&broken).unwrap()).unwrap();
    let (code, _, _) = affctl(&["--system", &system, "verify", "--chain", &broken_path]);
    ensure(code == 4, || format!("broken chain verify exit {code}"))?;
    checks += 4;

    // CSV outputs carry the exact library values
    let (code, out, err) = affctl(&[
        "--system",
        &system,
        "control-set",
        "--x-min",
        "0.25",
        "--x-max",
        "3",
        "--step",
        "0.25",
    ]);
    ensure(code == 0, || format!("control-set exit {code}: {err}"))?;
    let rows = csv_rows(&out);
    let descs = sweep(&sys, 0.25, 3.0, 0.25).unwrap();
    ensure(rows.len() == descs.len(), || "sweep row count".into())?;
    for (row, desc) in rows.iter().zip(&descs) {
        let i = desc.shape.interval().unwrap();
        ensure(
            same_bits(&row[0], desc.fiber_x)
                && row[1] == desc.shape.tag()
                && same_bits(&row[2], i.lo)
                && same_bits(&row[3], i.hi),
            || format!("sweep row {row:?} vs {desc:?}"),
        )?;
    }
    let (code, out, err) = affctl(&[
        "--system",
        &system,
        "oracle",
        "--x",
        "1.7",
        "--y",
        "-0.3",
        "--horizon",
        "25",
    ]);
    ensure(code == 0, || format!("oracle exit {code}: {err}"))?;
    let trace = reach_trace(&sys, 1.7, -0.3, 25).unwrap();
    for (row, expected) in csv_rows(&out).iter().zip(trace.rows()) {
        ensure(
            row[0] == expected.k.to_string()
                && same_bits(&row[1], expected.lo)
                && same_bits(&row[2], expected.hi),
            || format!("trace row {row:?} vs {expected:?}"),
        )?;
    }
    let (code, out, err) = affctl(&[
        "--system",
        &system,
        "simulate",
        "--from",
        "0.8,1.1",
        "--word",
        "0.3,-0.9,1.3,0",
    ]);
    ensure(code == 0, || format!("simulate exit {code}: {err}"))?;
    let word = ControlWord::new(vec![0.3, -0.9, 1.3, 0.0]);
    let states = trajectory(&sys, &pt(0.8, 1.1), &word, 4).unwrap();
    for (row, s) in csv_rows(&out).iter().zip(&states) {
        ensure(
            same_bits(&row[1], s.x()) && same_bits(&row[2], s.y()),
            || format!("simulate row {row:?}"),
        )?;
    }
    checks += 3;

    // fixed seed gives byte-identical stress output
    let cert_args = |seed: &'static str, out: &str| {
        vec![
            "--system".to_owned(),
            system.clone(),
            "--seed".into(),
            seed.into(),
            "--out".into(),
            out.to_owned(),
            "certificate".into(),
            "--x".into(),
            "1.2".into(),
            "--y".into(),
            "6".into(),
            "--attempts".into(),
            "40".into(),
        ]
    };
    let run = |args: Vec<String>| {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        affctl(&refs)
    };
    let (a, b, c) = (
        path("cert_a.json"),
        path("cert_b.json"),
        path("cert_c.json"),
    );
    for (seed, out) in [("17", &a), ("17", &b), ("18", &c)] {
        let (code, _, err) = run(cert_args(seed, out));
        ensure(code == 0, || format!("certificate exit {code}: {err}"))?;
    }
    let (bytes_a, bytes_b, bytes_c) = (
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        std::fs::read(&c).unwrap(),
    );
    ensure(bytes_a == bytes_b, || {
        "same seed produced different certificate output".into()
    })?;
    ensure(bytes_a != bytes_c, || {
        "seed has no effect on the stress test".into()
    })?;
    let parsed: serde_json::Value = serde_json::from_slice(&bytes_a).unwrap();
    let cert: EscapeCertificate = serde_json::from_value(parsed["certificate"].clone()).unwrap();
    ensure(
        cert == escape_certificate(&sys, &pt(1.2, 6.0), None).unwrap(),
        || "certificate JSON does not round-trip".into(),
    )?;
    checks += 2;

    // exit codes
    let unsupported = path("unsupported.json");
    std::fs::write(
        &unsupported,
        r#"{"a":0,"d":1.5,"g_coeffs":[1],"u_min":-1,"u_max":1}"#,
    )
    .unwrap();
    let invalid = path("invalid.json");
    std::fs::write(
        &invalid,
        r#"{"a":0,"d":0.5,"g_coeffs":[1],"u_min":0.5,"u_max":1}"#,
    )
    .unwrap();
    let (c3, _, _) = affctl(&["--system", &unsupported, "describe"]);
    let (c2, _, _) = affctl(&["--system", &invalid, "describe"]);
    ensure(c3 == 3 && c2 == 2, || {
        format!("exit codes {c3} / {c2}, expected 3 / 2")
    })?;
    checks += 1;

    ensure(Path::new(&system).exists(), || "temp dir vanished".into())?;
    Ok(format!(
        "{checks} round-trip, determinism and exit-code checks"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("group and translation identity", criterion_1),
        ("kernel, cocycle, concatenation", criterion_2),
        ("oracle vs closed-form control sets", criterion_3),
        ("forward invariance", criterion_4),
        ("backward invariance", criterion_5),
        ("d = 1 trichotomy and G0", criterion_6),
        ("d = -1 growth", criterion_7),
        ("chain construction", criterion_8),
        ("escape certificates", criterion_9),
        ("CLI round-trip and determinism", criterion_10),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2}: {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {label} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {label} ({secs:.1}s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
