//! Acceptance matrix. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{matrix, rel, s_coordinate_gap, s_space_integral, Case, M_SET};
use hextremal::cli::{solve_document, to_json, verify_document, Format, RunConfig, SolveDoc};
use hextremal::coeffs::{constants_ln, poly_big_q, poly_q, q_expanded};
use hextremal::geometry::{
    bando_futaki, chern_identity_residual, chern_identity_residual_shifted, class_integrals,
    fibre_reduced_integral, Verdict,
};
use hextremal::shoot::{find_m, SolveOptions};
use hextremal::{coeffs_from_c, integrate, IvpTrajectory, SectionClass, Status, SurfaceSpec};
use rand::{Rng, SeedableRng};
use serde_json::Value;

const TOL: f64 = 1e-9;

type Line = (bool, String);

fn traj(spec: &SurfaceSpec, c: f64) -> IvpTrajectory {
    let opts = SolveOptions::with_tol(TOL);
    integrate(&coeffs_from_c(spec, c), opts.ivp_tol(), opts.grid).expect("integration")
}

fn existence(cases: &[&Case]) -> Line {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut min_c = f64::INFINITY;
    for c in cases {
        let r = c.bvp.residuals.endpoint / c.spec.target();
        worst = worst.max(r);
        min_c = min_c.min(c.bvp.c_star);
        ok &= r <= TOL && c.bvp.c_star > 2.0;
    }
    (ok, format!("max |v(end)-target|/target = {worst:.2e}, min C* = {min_c:.6}"))
}

fn sharper_bound(cases: &[&Case]) -> Line {
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for c in cases {
        let (l, n) = constants_ln(&c.spec);
        let gap = c.bvp.c_star + n / l;
        margin = margin.min(gap);
        ok &= gap > 0.0;
    }
    (ok, format!("min C* - (-N/L) = {margin:.6}"))
}

fn thresholds(cases: &[&Case]) -> Vec<f64> {
    cases.iter().map(|c| find_m(&c.spec, TOL).expect("threshold").value).collect()
}

fn threshold_structure(cases: &[&Case], ms: &[f64]) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for (c, &m) in cases.iter().zip(ms) {
        let above = traj(&c.spec, m + 0.1);
        let below = traj(&c.spec, m - 0.1);
        ok &= m > 2.0 && c.bvp.c_star < m && !above.is_complete() && below.is_complete();
        parts.push(format!("M({})={:.5}", c.spec.m, m));
    }
    (ok, parts.join(" "))
}

fn limits(cases: &[&Case], ms: &[f64]) -> Line {
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for (c, &m) in cases.iter().zip(ms) {
        let (l, n) = constants_ln(&c.spec);
        let mut prev = f64::NEG_INFINITY;
        for cc in [-1.0, -10.0, -100.0, -1000.0] {
            let t = traj(&c.spec, cc);
            let u = t.end_value();
            ok &= t.is_complete() && u > prev && u > c.spec.initial_value() + l * cc + n;
            prev = u;
        }
        let mut prev = f64::INFINITY;
        for k in 1..=5 {
            let u = traj(&c.spec, m - 10f64.powi(-k)).end_value();
            ok &= u < prev;
            prev = u;
        }
        let ratio = prev / c.spec.target();
        worst_ratio = worst_ratio.max(ratio);
        ok &= ratio < 0.05;
    }
    (ok, format!("max v(end; M-1e-5)/target = {worst_ratio:.2e}"))
}

fn monotonicity(cases: &[&Case], ms: &[f64]) -> Line {
    let mut ok = true;
    let mut checks = 0;
    let mut min_slack = f64::INFINITY;
    for (c, &m) in cases.iter().zip(ms) {
        let cs = [-10.0, 0.0, 2.0, c.bvp.c_star, 0.5 * (c.bvp.c_star + m)];
        let trajs: Vec<_> = cs.iter().map(|&x| traj(&c.spec, x)).collect();
        let n = trajs[0].gamma_grid.len();
        let idx: Vec<usize> = (1..=5).map(|j| j * (n - 1) / 5).collect();
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                for &k in &idx {
                    let g = trajs[i].gamma_grid[k];
                    let (v1, v2) = (trajs[i].v_values[k], trajs[j].v_values[k]);
                    let q = poly_big_q(&c.spec, g).expect("in domain");
                    let slack = v1 - (v2 - q * (cs[j] - cs[i]));
                    min_slack = min_slack.min(slack);
                    ok &= trajs[i].is_complete() && trajs[j].is_complete() && v2 < v1 && slack >= -1e-8;
                    checks += 1;
                }
            }
        }
        let mut prev = f64::INFINITY;
        for cc in [m + 0.1, m + 1.0, m + 10.0, 2.0 * m + 10.0] {
            match traj(&c.spec, cc).status {
                Status::Breakdown { gamma_star } => {
                    ok &= gamma_star < prev;
                    prev = gamma_star;
                }
                Status::Complete => ok = false,
            }
        }
    }
    (ok, format!("{checks} ordered pairs, min gap slack = {min_slack:.3e}; breakdown points nested"))
}

fn boundary(cases: &[Case]) -> Line {
    let mut ok = true;
    let mut worst_val = 0.0f64;
    let mut worst_slope = 0.0f64;
    let mut worst_at = String::new();
    for c in cases {
        let p = &c.prof;
        let d = c.spec.degree as f64;
        // φ'(1) = -1/d, φ'(end) = 1/d for negative degree; the positive degree
        // conditions are φ'(1) = 1/d, φ'(end) = -1/d.
        let (left, right) = if d < 0.0 { (-1.0 / d, 1.0 / d) } else { (1.0 / d, -1.0 / d) };
        let n = p.phi.len();
        let val = p.phi[0].abs().max(p.phi[n - 1].abs());
        let slope = (p.phi_prime_left - left).abs().max((p.phi_prime_right - right).abs());
        worst_val = worst_val.max(val);
        if slope > worst_slope {
            worst_slope = slope;
            worst_at = c.label();
        }
        ok &= val <= 1e-8 && slope <= 1e-5 && p.phi[1..n - 1].iter().all(|&x| x > 0.0);
    }
    (ok, format!("{} cases, max |phi(end)| = {worst_val:.2e}, max slope error = {worst_slope:.2e} at {worst_at}", cases.len()))
}

fn chern(cases: &[Case]) -> Line {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut control = f64::INFINITY;
    for c in cases {
        let r = chern_identity_residual(&c.prof);
        let s = chern_identity_residual_shifted(&c.prof, 1.0);
        worst = worst.max(r);
        control = control.min(s);
        ok &= r <= 1e-3 && s >= 1.0;
    }
    (ok, format!("max residual = {worst:.2e}, min shifted-control residual = {control:.3}"))
}

fn areas(cases: &[Case]) -> Line {
    let mut ok = true;
    let mut worst = 0.0f64;
    for c in cases {
        let ci = class_integrals(&c.prof);
        let m = c.spec.m;
        let e1 = rel(ci.fibre_area, 2.0 * PI * m);
        let e2 = rel(ci.section_area, 2.0 * PI * (1.0 + c.spec.abs_degree() * m));
        let label = if c.spec.degree < 0 { SectionClass::Infinity } else { SectionClass::Zero };
        worst = worst.max(e1).max(e2);
        ok &= e1 <= 1e-8 && e2 <= 1e-8 && ci.section == label;
    }
    (ok, format!("max relative area error = {worst:.2e}"))
}

fn futaki(cases: &[Case]) -> Line {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut worst_s = 0.0f64;
    let mut max_value = f64::NEG_INFINITY;
    for c in cases {
        let rep = bando_futaki(&c.prof);
        max_value = max_value.max(rep.futaki_value);
        ok &= rep.futaki_value < 0.0 && rep.verdict == Verdict::NotHcscK;

        let co = c.bvp.coeffs;
        let lam = move |g: f64| co.slope * g + co.intercept;
        let vol = s_space_integral(&c.prof, |_| 1.0);
        let lam0 = s_space_integral(&c.prof, lam) / vol;
        let dev = s_space_integral(&c.prof, |g| (lam(g) - lam0).powi(2));
        let pairs = [
            (fibre_reduced_integral(&c.spec, |_| 1.0), vol),
            (fibre_reduced_integral(&c.spec, lam), lam0 * vol),
            (fibre_reduced_integral(&c.spec, |g| (lam(g) - rep.lambda0).powi(2)), dev),
        ];
        for (one_d, two_d) in pairs {
            let e = rel(one_d, two_d);
            worst = worst.max(e);
            ok &= e <= 1e-4;
        }
        let gap = s_coordinate_gap(&c.prof);
        worst_s = worst_s.max(gap);
        ok &= gap <= 1e-6;
        // Invariant in the class a·C + b·S from the s-space integral alone.
        let a = c.spec.a;
        let factor = c.spec.degree_sq() / (2.0 * a * a);
        let oracle = -factor * factor * (a / (2.0 * PI)).powi(2) * dev;
        let e = rel(rep.futaki_value, oracle);
        worst = worst.max(e);
        ok &= e <= 1e-4;
    }
    (
        ok,
        format!("max futakiValue = {max_value:.3e}, max 1D vs 2D relative gap = {worst:.2e}, max s-coordinate gap = {worst_s:.1e}"),
    )
}

fn coefficient_algebra(cases: &[Case]) -> Line {
    let mut ok = true;
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let (mut e_p, mut e_q, mut e_a, mut e_qf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for c in cases {
        let spec = &c.spec;
        let expected = 2.0 * spec.genus_factor() * spec.abs_degree();
        for cc in [-50.0, 0.0, c.bvp.c_star, 100.0] {
            let set = coeffs_from_c(spec, cc);
            let e = rel(set.p(1.0).unwrap(), expected).max(rel(set.p(spec.gamma_end).unwrap(), -expected));
            e_p = e_p.max(e);
        }
        let (l, n) = constants_ln(spec);
        e_q = e_q.max((poly_big_q(spec, spec.gamma_end).unwrap() - l).abs() / l.abs().max(1.0));
        e_a = e_a.max(coeffs_from_c(spec, -n / l).slope.abs());
        for _ in 0..1000 {
            let g = rng.gen_range(1.0..=spec.gamma_end);
            let f = poly_q(spec, g).unwrap();
            e_qf = e_qf.max((f - q_expanded(spec, g)).abs() / f.abs().max(1.0));
        }
    }
    ok &= e_p <= 1e-12 && e_q <= 1e-10 && e_a <= 1e-10 && e_qf <= 1e-12;
    (ok, format!("p endpoints {e_p:.1e}, |Q(end)-L| {e_q:.1e}, |A(-N/L)| {e_a:.1e}, q forms {e_qf:.1e}"))
}

fn config(spec: &SurfaceSpec) -> RunConfig {
    RunConfig {
        command: "solve".into(),
        genus: spec.genus,
        degree: spec.degree,
        m: Some(spec.m),
        a: None,
        b: None,
        tol: TOL,
        grid: 512,
        format: Format::Json,
    }
}

fn document(spec: &SurfaceSpec) -> SolveDoc {
    solve_document(spec, config(spec)).expect("pipeline")
}

/// Compares two documents leaf by leaf, skipping class-label metadata.
fn compare(a: &Value, b: &Value, path: &str, fields: &mut usize, worst: &mut f64) -> bool {
    const LABELS: [&str; 3] = ["degree", "section", "tau"];
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => x.iter().all(|(k, va)| {
            LABELS.contains(&k.as_str()) || y.get(k).is_some_and(|vb| compare(va, vb, &format!("{path}.{k}"), fields, worst))
        }),
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).enumerate().all(|(i, (va, vb))| compare(va, vb, &format!("{path}[{i}]"), fields, worst))
        }
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            let e = (x - y).abs() / x.abs().max(1.0);
            *fields += 1;
            *worst = worst.max(e);
            e <= 1e-12
        }
        _ => {
            *fields += 1;
            a == b
        }
    }
}

fn sign_equivalence() -> Line {
    let mut ok = true;
    let mut fields = 0;
    let mut worst = 0.0f64;
    for (g, d) in [(2u32, -1i32), (3, -2), (4, -1)] {
        for m in M_SET {
            let neg = SurfaceSpec::normalized(g, d, m).unwrap();
            let a = serde_json::to_value(document(&neg)).unwrap();
            let b = serde_json::to_value(document(&neg.with_flipped_degree())).unwrap();
            ok &= compare(&a, &b, "", &mut fields, &mut worst);
        }
    }
    (ok, format!("{fields} fields compared, max relative difference = {worst:.1e}"))
}

fn round_trip(cases: &[Case]) -> Line {
    let mut ok = true;
    for c in cases {
        let first = to_json(&document(&c.spec));
        let second = to_json(&document(&c.spec));
        let parsed: SolveDoc = serde_json::from_str(&first).expect("document parses");
        ok &= first == second && verify_document(&parsed).map(|r| r.passed).unwrap_or(false);
    }

    let dir = tempfile::tempdir().expect("temp dir");
    let bin = env!("CARGO_BIN_EXE_hextremal");
    let path = |name: &str| dir.path().join(name);
    let solve = |out: &str| {
        Command::new(bin).args(["solve", "--m", "1", "--output"]).arg(path(out)).status().expect("spawn").success()
    };
    ok &= solve("one.json") && solve("two.json");
    let same = std::fs::read(path("one.json")).ok() == std::fs::read(path("two.json")).ok();
    let verified =
        Command::new(bin).arg("verify").arg("--input").arg(path("one.json")).output().expect("spawn").status.success();
    ok &= same && verified;
    (ok, format!("{} library documents and the binary: byte-identical reruns, verify passes", cases.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cases = matrix();
    let base: Vec<&Case> = cases.iter().filter(|c| c.spec.genus == 2 && c.spec.degree == -1).collect();
    let ms = thresholds(&base);

    let results: Vec<(&str, Line)> = vec![
        ("existence and target", existence(&base)),
        ("C* above -N/L", sharper_bound(&base)),
        ("threshold structure", threshold_structure(&base, &ms)),
        ("limits in C", limits(&base, &ms)),
        ("monotonicity certificates", monotonicity(&base, &ms)),
        ("profile boundary conditions", boundary(&cases)),
        ("pointwise Chern identity", chern(&cases)),
        ("class integrals", areas(&cases)),
        ("Bando-Futaki obstruction", futaki(&cases)),
        ("coefficient algebra", coefficient_algebra(&cases)),
        ("degree sign equivalence", sign_equivalence()),
        ("determinism and round trip", round_trip(&cases)),
    ];

    let mut passed = 0;
    for (i, (name, (ok, detail))) in results.iter().enumerate() {
        println!("criterion {:>2} {:<28} {}  {detail}", i + 1, name, if *ok { "PASS" } else { "FAIL" });
        passed += usize::from(*ok);
    }
    println!("acceptance: {passed}/{} passed in {:.1?}", results.len(), start.elapsed());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
