//! Acceptance suite. Prints one `criterion k: PASS|FAIL` line per criterion and
//! exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dpcalc::cli::{parse_config, run};
use dpcalc::identities::{
    check_eq10, check_eq12, check_eq14, check_eq18, check_eq19, check_eq2, check_eq20, check_eq21,
    check_gamma_identity, check_partition_invariance, check_prop23, check_prop24, check_remark25,
    CheckParams, CheckReport, Rule,
};
use dpcalc::rng::derive_seed;
use dpcalc::transforms::{
    gamma_identity_check, jacobi_rule, moment_integral, moment_integral_adaptive, psi, psi_adaptive,
};
use dpcalc::{BaseMeasure, Functional, ShapeMeasure};

const SEED: u64 = 7_340_021;
const COIN: &str = "0.5*delta(0)+0.5*delta(1)";

fn params(theta: f64, base: &str, functional: &str, label: u64) -> CheckParams {
    CheckParams {
        theta: Some(theta),
        base: Some(base.into()),
        functional: Some(functional.into()),
        seed: Some(derive_seed(SEED, label)),
        ..Default::default()
    }
}

fn expect_pass(r: &CheckReport) {
    let bad: Vec<String> = r
        .points
        .iter()
        .filter(|p| !p.pass)
        .map(|p| {
            format!(
                "{}: statistic {:.3e} > tolerance {:.3e}",
                p.label, p.statistic, p.tolerance
            )
        })
        .collect();
    assert!(
        r.pass && bad.is_empty() && !r.points.is_empty(),
        "{} failed (params {:?}): {bad:?} {:?}",
        r.check,
        r.params,
        r.notes
    );
}

fn has_label(r: &CheckReport, needle: &str) -> bool {
    r.points.iter().any(|p| p.label.contains(needle))
}

fn stderr_k(rule: &Rule) -> Option<f64> {
    match rule {
        Rule::StdErr { k, .. } => Some(*k),
        _ => None,
    }
}

fn criterion_1() {
    let p = CheckParams {
        z_grid: Some(vec![0.5, 1.0, 3.0, 10.0]),
        n_samples: Some(1_000_000),
        ..params(1.0, COIN, "id", 1)
    };
    let r = check_eq2(&p).unwrap();
    expect_pass(&r);
    assert_eq!(r.points.len(), 4);
    for (pt, z) in r.points.iter().zip([0.5f64, 1.0, 3.0, 10.0]) {
        assert!((pt.rhs - (1.0 + z).powf(-0.5)).abs() < 1e-12, "{pt:?}");
        assert_eq!(stderr_k(&pt.rule), Some(3.0));
    }
    assert!((r.points[2].rhs - 0.5).abs() < 1e-12);
}

fn criterion_2() {
    let pairs = [(2.0, 0.5), (1.0, 1.0), (0.5, 1.0), (0.75, 2.0), (1.0, 3.0)];
    let mut label = 100;
    for (theta, q) in pairs {
        for base in [COIN, "uniform(0,1)"] {
            label += 1;
            let p = CheckParams {
                q: Some(q),
                z_grid: Some(vec![0.5, 1.0, 3.0]),
                n_samples: Some(100_000),
                ..params(theta, base, "id", label)
            };
            let r = check_eq14(&p).unwrap();
            expect_pass(&r);
            assert!(has_label(&r, "transform mc vs laplace mc"));
            if theta > q {
                assert!(
                    has_label(&r, "order-q quadrature"),
                    "missing quadrature at theta={theta} q={q}"
                );
            }
            if q == 1.0 {
                assert!(
                    has_label(&r, "order-one quadrature"),
                    "missing order-one at theta={theta}"
                );
            }
        }
    }
}

fn criterion_3() {
    let p = CheckParams {
        q: Some(2.0),
        n_list: Some(vec![2, 3, 4]),
        z_grid: Some(vec![1.0]),
        ..params(0.75, "uniform(0,1)", "id", 3)
    };
    let r = check_partition_invariance(&p).unwrap();
    expect_pass(&r);
    let exact: Vec<_> = r.points.iter().filter(|p| p.label.contains(" vs n=")).collect();
    assert_eq!(exact.len(), 2);
    for pt in exact {
        assert_eq!(pt.rule, Rule::Absolute { tol: 1e-8 });
    }
    assert!(has_label(&r, "transform mc"));
}

fn criterion_4() {
    let fixtures = [
        (1.0, 0.0, 1, COIN),
        (2.0, 0.5, 2, COIN),
        (1.0, 0.5, 0, "uniform(0,1)"),
    ];
    for (i, (theta, d, n, base)) in fixtures.into_iter().enumerate() {
        let p = CheckParams {
            d: Some(d),
            n: Some(n),
            ..params(theta, base, "id", 40 + i as u64)
        };
        let r = check_eq10(&p).unwrap();
        expect_pass(&r);
        if d == 0.0 && n > 0 {
            assert!(r.notes.iter().any(|s| s.contains("not a Gamma process")));
        }
    }
    let p = CheckParams {
        q: Some(1.0),
        z_grid: Some(vec![0.0, 0.5, 1.0, 3.0]),
        ..params(2.0, "uniform(0,1)", "id", 45)
    };
    let r = check_eq12(&p).unwrap();
    expect_pass(&r);
    assert!((r.points[0].rhs - 1.0).abs() < 1e-12);
    let p = CheckParams {
        q: Some(1.0),
        atoms: Some(vec![0.0, 1.0]),
        sizes: Some(vec![1, 1]),
        ..params(1.0, "uniform(0,1)", "id", 46)
    };
    expect_pass(&check_eq12(&p).unwrap());
}

fn criterion_5() {
    let runs: Vec<(&str, CheckReport)> = vec![
        (
            "eq18",
            check_eq18(&CheckParams {
                q: Some(1.0),
                ..params(2.0, "uniform(0,1)", "id", 51)
            })
            .unwrap(),
        ),
        (
            "eq18",
            check_eq18(&CheckParams {
                q: Some(2.0),
                ..params(0.5, COIN, "id", 52)
            })
            .unwrap(),
        ),
        (
            "eq19",
            check_eq19(&params(1.0, "uniform(0,1)", "id", 53)).unwrap(),
        ),
        (
            "eq20",
            check_eq20(&params(1.0, "uniform(0,1)", "id", 54)).unwrap(),
        ),
        (
            "eq20",
            check_eq20(&params(1.5, "uniform(0,1)", "const(1)", 55)).unwrap(),
        ),
        (
            "eq21",
            check_eq21(&CheckParams {
                q: Some(2.0),
                ..params(1.0, COIN, "indicator(0.5,1.5)", 56)
            })
            .unwrap(),
        ),
    ];
    for (name, r) in &runs {
        expect_pass(r);
        assert_eq!(r.params.n_samples, Some(100_000), "{name}");
        let ks = r
            .points
            .iter()
            .filter(|p| matches!(p.rule, Rule::Ks { .. }))
            .count();
        assert!(ks >= 1, "{name} has no KS point");
    }
    let eq21 = &runs[5].1;
    assert!(has_label(eq21, "first moment") && has_label(eq21, "second moment"));
}

fn criterion_6() {
    for (i, theta) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let p = CheckParams {
            z_grid: Some(vec![0.5, 1.0, 3.0]),
            ..params(theta, "arcsine", "id", 60 + i as u64)
        };
        let r = check_prop24(&p).unwrap();
        expect_pass(&r);
        for pt in r
            .points
            .iter()
            .filter(|p| p.label.ends_with("beta-gamma laplace"))
        {
            let z: f64 = pt.label[2..pt.label.find(' ').unwrap()].parse().unwrap();
            assert!((pt.rhs - (1.0 + z).powf(-(theta + 0.5))).abs() < 1e-12);
            assert_eq!(stderr_k(&pt.rule), Some(3.0));
        }
        if theta == 1.0 {
            let var = r.points.iter().find(|p| p.label == "variance").unwrap();
            assert!((var.rhs - 1.0 / 16.0).abs() < 1e-15);
            assert_eq!(stderr_k(&var.rule), Some(4.0));
        }
    }
}

fn criterion_7() {
    for n in [1usize, 2] {
        let p = CheckParams {
            n: Some(n),
            ..params(1.0, "arcsine", "id", 70 + n as u64)
        };
        let r = check_prop23(&p).unwrap();
        expect_pass(&r);
        if n == 2 {
            let tie = r
                .points
                .iter()
                .find(|p| p.label == "all urn values tied")
                .unwrap();
            assert!((tie.rhs - 0.5).abs() < 1e-12);
        }
    }
}

fn criterion_8() {
    let p = CheckParams {
        p_grid: Some(vec![0.3, 0.5, 0.7]),
        theta_grid: Some(vec![0.5, 1.0, 2.0]),
        seed: Some(derive_seed(SEED, 8)),
        ..Default::default()
    };
    let r = check_remark25(&p).unwrap();
    expect_pass(&r);
    let ks = r
        .points
        .iter()
        .filter(|p| matches!(p.rule, Rule::Ks { .. }))
        .count();
    assert_eq!(ks, 9);
}

fn criterion_9() {
    // Gauss-Jacobi rules against Beta moments Π_{j<k} (a+j)/(a+b+j).
    for (a, b) in [(0.5, 0.5), (1.0, 2.0), (2.5, 0.75), (0.3, 4.0), (3.0, 3.0)] {
        for m in [8usize, 32, 64] {
            let rule = jacobi_rule(a, b, m).unwrap();
            let mut moment = 1.0f64;
            for k in 0..(2 * m).min(40) {
                if k > 0 {
                    moment *= (a + (k - 1) as f64) / (a + b + (k - 1) as f64);
                }
                let got = rule.integrate(|u| u.powi(k as i32));
                assert!(
                    (got - moment).abs() <= 1e-12,
                    "a={a} b={b} m={m} k={k}: {got} vs {moment}"
                );
            }
        }
    }
    // psi and the moment integral against the adaptive integrator.
    let bases = [
        "uniform(0,1)",
        "arcsine",
        "beta(2,3)",
        "0.3*delta(0.2)+0.7*uniform(0,2)",
        "beta(0.7,1.5)",
    ];
    let functionals = ["id", "indicator(0.25,0.75)", "2*id+const(0.5)", "poly(0.1,1,1)"];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..10 {
        let h: BaseMeasure = bases[rng.random_range(0..bases.len())].parse().unwrap();
        let g: Functional = functionals[rng.random_range(0..functionals.len())]
            .parse()
            .unwrap();
        let theta = rng.random_range(0.2..3.0);
        let z = rng.random_range(0.0..5.0);
        let u = rng.random_range(0.0..1.0);
        let e = rng.random_range(1..4u32);
        let shape = ShapeMeasure::new(theta, h.clone()).unwrap();
        let (a, b) = (psi(&shape, &g, z).unwrap(), psi_adaptive(&shape, &g, z).unwrap());
        assert!((a - b).abs() <= 1e-10, "psi {h:?} {g:?} z={z}: {a} vs {b}");
        let (a, b) = (
            moment_integral(&h, &g, z, u, e).unwrap(),
            moment_integral_adaptive(&h, &g, z, u, e).unwrap(),
        );
        assert!(
            (a - b).abs() <= 1e-10,
            "moment {h:?} {g:?} z={z} u={u} e={e}: {a} vs {b}"
        );
    }
    let r = check_gamma_identity(&CheckParams::default()).unwrap();
    expect_pass(&r);
    for pt in &r.points {
        assert_eq!(pt.rule, Rule::Relative { tol: 1e-8 });
    }
    for (t, q) in [(1.0f64, 1.0f64), (2.0, 1.0), (3.0, 0.5)] {
        let got = gamma_identity_check(t, q).unwrap();
        let want = t.powf(-q);
        assert!((got - want).abs() <= 1e-8 * want, "T={t} q={q}: {got} vs {want}");
    }
}

const SUITE: &str = r#"
seed = 99

[[check]]
name = "check_eq17"
theta = 0.5
base = "0.5*delta(0)+0.5*delta(1)"
n_samples = 20000

[[check]]
name = "check_gamma_identity"

[[check]]
name = "check_remark25"
p_grid = [0.5]
theta_grid = [1.0]
n_samples = 10000
"#;

fn criterion_10() {
    let cfg = parse_config(SUITE).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    assert!(run(&cfg, &mut a, false).unwrap());
    assert!(run(&cfg, &mut b, false).unwrap());
    assert!(!a.is_empty() && a == b, "library reports differ between runs");

    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, SUITE).unwrap();
    let bin = env!("CARGO_BIN_EXE_dpcalc");
    let out = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(bin)
            .arg("run")
            .arg(&good)
            .arg("--out")
            .arg(&path)
            .env_remove("DPCALC_SEED")
            .status()
            .unwrap();
        (status, std::fs::read(&path).unwrap())
    };
    let (s1, r1) = out("r1.jsonl");
    let (s2, r2) = out("r2.jsonl");
    assert!(s1.success() && s2.success());
    assert_eq!(r1, r2, "binary reports differ between runs");
    assert_eq!(r1, a, "binary and library reports differ");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, format!("{SUITE}rhs_scale = 1.05\n")).unwrap();
    let status = Command::new(bin)
        .arg("run")
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("bad.jsonl"))
        .status()
        .unwrap();
    assert!(!status.success(), "corrupted RHS passed");
    assert_eq!(status.code(), Some(1));
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        (
            "order-theta transform equals the Gamma Laplace functional (N=1e6, 3 SE)",
            criterion_1,
        ),
        (
            "order-q transform: MC vs Beta-Gamma MC vs quadratures, 10 fixtures",
            criterion_2,
        ),
        (
            "partition expansion invariant in n to 1e-8 and matches MC",
            criterion_3,
        ),
        (
            "posterior Beta-Gamma mixture and posterior Gamma-ratio checks at 3 SE",
            criterion_4,
        ),
        ("distributional identities by two-sample KS at N=1e5", criterion_5),
        (
            "arcsine base: Beta law, variance 1/16, Beta-Gamma Laplace",
            criterion_6,
        ),
        ("constraint identity in law for n=1 and n=2", criterion_7),
        ("stable representation vs Beta(1, theta) on 9 points", criterion_8),
        ("quadrature and special-function numerics", criterion_9),
        ("byte-identical reports and negative control", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (desc, f)) in criteria.iter().enumerate() {
        let k = i + 1;
        let tag = format!("criterion {k}");
        if !filter.is_empty() && !filter.iter().any(|s| tag.contains(s.as_str())) {
            continue;
        }
        match panic::catch_unwind(AssertUnwindSafe(f)) {
            Ok(()) => println!("{tag}: PASS  {desc}"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("{tag}: FAIL  {desc}\n    {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
