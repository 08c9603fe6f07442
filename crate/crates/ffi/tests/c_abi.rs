use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use dpcalc_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = dpc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

struct Handles {
    shape: *mut DpcShape,
    g: *mut DpcFunctional,
}

impl Handles {
    fn new(theta: f64, base: &str, g: &str) -> Self {
        let mut shape = ptr::null_mut();
        let mut func = ptr::null_mut();
        unsafe {
            assert_eq!(
                dpc_shape_new(theta, cstr(base).as_ptr(), &mut shape),
                DpcStatus::Ok
            );
            assert_eq!(dpc_functional_new(cstr(g).as_ptr(), &mut func), DpcStatus::Ok);
        }
        Self { shape, g: func }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            dpc_shape_free(self.shape);
            dpc_functional_free(self.g);
        }
    }
}

const COIN: &str = "0.5*delta(0)+0.5*delta(1)";

#[test]
fn closed_forms() {
    let h = Handles::new(1.0, COIN, "id");
    let mut v = 0.0;
    unsafe {
        assert_eq!(dpc_laplace_gamma(h.shape, h.g, 3.0, &mut v), DpcStatus::Ok);
        assert!((v - 0.5).abs() < 1e-14);
        assert_eq!(dpc_psi(h.shape, h.g, 3.0, &mut v), DpcStatus::Ok);
        assert!((v - 2f64.ln()).abs() < 1e-14);
        assert_eq!(dpc_cs_eq17(h.shape, h.g, 3.0, 64, &mut v), DpcStatus::Ok);
        assert!((v - 0.5).abs() < 1e-10);
    }
    // g ≡ 1: the order-q transform is (1 + z)^{-q}.
    let h = Handles::new(2.0, "uniform(0,1)", "const(1)");
    unsafe {
        assert_eq!(dpc_cs_eq15(h.shape, h.g, 1.0, 1.0, 64, &mut v), DpcStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
    }
    let h = Handles::new(0.75, "uniform(0,1)", "id");
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            dpc_cs_partition_expansion(h.shape, h.g, 1.0, 2.0, 2, 64, &mut a),
            DpcStatus::Ok
        );
        assert_eq!(
            dpc_cs_partition_expansion(h.shape, h.g, 1.0, 2.0, 3, 64, &mut b),
            DpcStatus::Ok
        );
    }
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn monte_carlo_and_sampling() {
    let h = Handles::new(1.0, COIN, "id");
    let (mut m, mut se) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            dpc_cs_transform_mc(h.shape, h.g, 3.0, 1.0, 50_000, 1e-8, 3, &mut m, &mut se),
            DpcStatus::Ok
        );
    }
    assert!(se > 0.0 && (m - 0.5).abs() < 4.0 * se, "{m} ± {se}");
    unsafe {
        assert_eq!(
            dpc_bg_laplace_mc(h.shape, 0.0, h.g, 3.0, 50_000, 1e-8, 4, &mut m, &mut se),
            DpcStatus::Ok
        );
    }
    assert!((m - 0.5).abs() < 4.0 * se, "{m} ± {se}");

    let mut xs = vec![0.0; 500];
    let mut ys = vec![0.0; 500];
    unsafe {
        assert_eq!(
            dpc_sample_functional(
                h.shape,
                h.g,
                DpcProcess::Dirichlet,
                0.0,
                1e-8,
                9,
                xs.len(),
                xs.as_mut_ptr()
            ),
            DpcStatus::Ok
        );
        assert_eq!(
            dpc_sample_functional(
                h.shape,
                h.g,
                DpcProcess::Dirichlet,
                0.0,
                1e-8,
                9,
                ys.len(),
                ys.as_mut_ptr()
            ),
            DpcStatus::Ok
        );
    }
    assert_eq!(xs, ys);
    assert!(xs.iter().all(|x| (0.0..=1.0).contains(x)));
    unsafe {
        assert_eq!(
            dpc_sample_functional(
                h.shape,
                h.g,
                DpcProcess::BetaGamma,
                2.0,
                1e-8,
                9,
                10,
                xs.as_mut_ptr()
            ),
            DpcStatus::Precondition
        );
    }
    assert!(last_error().contains("theta - d > 0"));
}

#[test]
fn errors_map_to_status_codes() {
    let mut shape = ptr::null_mut();
    let mut g = ptr::null_mut();
    let mut v = 0.0;
    unsafe {
        assert_eq!(
            dpc_shape_new(1.0, cstr("gauss(0,1)").as_ptr(), &mut shape),
            DpcStatus::Parse
        );
        assert!(shape.is_null());
        assert_eq!(
            dpc_shape_new(-1.0, cstr("uniform(0,1)").as_ptr(), &mut shape),
            DpcStatus::InvalidParameter
        );
        assert_eq!(
            dpc_shape_new(1.0, ptr::null(), &mut shape),
            DpcStatus::NullPointer
        );
        assert_eq!(
            dpc_functional_new(cstr("id").as_ptr(), ptr::null_mut()),
            DpcStatus::NullPointer
        );
        assert_eq!(
            dpc_psi(ptr::null(), ptr::null(), 1.0, &mut v),
            DpcStatus::NullPointer
        );
        assert!(last_error().contains("shape"));
        let bad = [0xffu8, 0];
        assert_eq!(
            dpc_functional_new(bad.as_ptr().cast(), &mut g),
            DpcStatus::InvalidUtf8
        );
    }
    let h = Handles::new(1.0, "uniform(0,1)", "id");
    unsafe {
        assert_eq!(
            dpc_cs_eq15(h.shape, h.g, 1.0, 2.0, 64, &mut v),
            DpcStatus::Precondition
        );
        assert!(last_error().contains("theta - q > 0"));
        assert_eq!(dpc_psi(h.shape, h.g, -2.0, &mut v), DpcStatus::Domain);
        dpc_shape_free(ptr::null_mut());
        dpc_functional_free(ptr::null_mut());
        dpc_string_free(ptr::null_mut());
    }
}

#[test]
fn run_config_returns_reports() {
    let cfg = cstr("seed = 3\n[[check]]\nname = \"check_gamma_identity\"\n\n[[check]]\nname = \"check_eq17\"\nn_samples = 10000\n");
    let mut out = ptr::null_mut();
    let mut pass = false;
    unsafe {
        assert_eq!(dpc_run_config(cfg.as_ptr(), &mut out, &mut pass), DpcStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        dpc_string_free(out);
        assert!(pass);
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("{\"check\":\"check_gamma_identity\""));

        let bad = cstr("[[check]]\nname = \"nope\"\n");
        assert_eq!(
            dpc_run_config(bad.as_ptr(), &mut out, &mut pass),
            DpcStatus::Parse
        );
        assert!(last_error().contains("check_eq2"));

        let mut list = ptr::null_mut();
        assert_eq!(dpc_list_checks(&mut list), DpcStatus::Ok);
        let names = CStr::from_ptr(list).to_str().unwrap().to_owned();
        dpc_string_free(list);
        assert!(names.contains("check_prop24"));
    }
}

#[test]
fn errors_are_thread_local() {
    let h = Handles::new(1.0, "uniform(0,1)", "id");
    let mut v = 0.0;
    unsafe {
        assert_eq!(
            dpc_cs_eq15(h.shape, h.g, 1.0, 2.0, 64, &mut v),
            DpcStatus::Precondition
        );
    }
    let other = std::thread::spawn(|| dpc_last_error().is_null()).join().unwrap();
    assert!(other);
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = include.join("dpcalc.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "dpc_shape_new",
        "dpc_run_config",
        "DPC_STATUS_PRECONDITION",
        "typedef struct DpcShape DpcShape",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"dpcalc.h\"\nint main(void) { DpcShape *s = 0; DpcStatus st = dpc_shape_new(1.0, \"uniform(0,1)\", &s); dpc_shape_free(s); return st == DPC_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    for (compiler, extra) in [("cc", vec!["-std=c99"]), ("c++", vec!["-x", "c++"])] {
        let Ok(out) = Command::new(compiler)
            .args(&extra)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(&include)
            .arg(&src)
            .output()
        else {
            eprintln!("{compiler} not found; skipping");
            continue;
        };
        assert!(
            out.status.success(),
            "{compiler}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
