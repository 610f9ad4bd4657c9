use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use bec_design_ffi::*;

const RHO6: ([u32; 1], [f64; 1]) = ([6], [1.0]);

fn last_error() -> String {
    let p = bec_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn design_and_inspect() {
    unsafe {
        let mut d = ptr::null_mut();
        let s = bec_design_eps(RHO6.0.as_ptr(), RHO6.1.as_ptr(), 1, 0.48, BecDesignKind::TypeMb, 4, &mut d);
        assert_eq!(s, BecStatus::Ok);
        assert!(bec_last_error_message().is_null());
        let mut info = BecDesignInfo::default();
        assert_eq!(bec_design_info(d, &mut info), BecStatus::Ok);
        assert_eq!((info.n, info.dv, info.p), (13, 8, 4));

        let mut e = ptr::null_mut();
        assert_eq!(bec_design_ensemble(d, &mut e), BecStatus::Ok);
        bec_design_free(d);

        let mut len = 0;
        assert_eq!(bec_ensemble_lambda(e, ptr::null_mut(), ptr::null_mut(), 0, &mut len), BecStatus::Ok);
        assert_eq!(len, 4);
        let (mut degs, mut coeffs) = (vec![0u32; len], vec![0.0; len]);
        assert_eq!(
            bec_ensemble_lambda(e, degs.as_mut_ptr(), coeffs.as_mut_ptr(), len, &mut len),
            BecStatus::Ok
        );
        assert_eq!(degs, [2, 3, 4, 8]);
        assert!((coeffs[0] - 0.2 / 0.48).abs() < 1e-12);

        let (mut ok, mut margin) = (false, 0.0);
        assert_eq!(bec_ensemble_check(e, 0.48, &mut ok, &mut margin), BecStatus::Ok);
        assert!(ok);
        let mut th = 0.0;
        assert_eq!(bec_ensemble_threshold(e, 1e-6, &mut th), BecStatus::Ok);
        assert!((th - 0.48).abs() < 1e-3);
        let mut rate = 0.0;
        assert_eq!(bec_ensemble_rate(e, &mut rate), BecStatus::Ok);
        assert!((rate - 0.4926).abs() < 1e-4);
        bec_ensemble_free(e);
    }
}

#[test]
fn json_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("e.json").to_str().unwrap()).unwrap();
    unsafe {
        let (ld, lc) = ([2u32, 3, 7], [0.4, 0.3, 0.3]);
        let mut e = ptr::null_mut();
        let s = bec_ensemble_new(ld.as_ptr(), lc.as_ptr(), 3, RHO6.0.as_ptr(), RHO6.1.as_ptr(), 1, &mut e);
        assert_eq!(s, BecStatus::Ok);
        assert_eq!(bec_ensemble_save(e, path.as_ptr()), BecStatus::Ok);

        let mut back = ptr::null_mut();
        assert_eq!(bec_ensemble_load(path.as_ptr(), &mut back), BecStatus::Ok);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(bec_ensemble_to_json(e, &mut a), BecStatus::Ok);
        assert_eq!(bec_ensemble_to_json(back, &mut b), BecStatus::Ok);
        assert_eq!(CStr::from_ptr(a), CStr::from_ptr(b));

        let mut again = ptr::null_mut();
        assert_eq!(bec_ensemble_from_json(a, &mut again), BecStatus::Ok);
        bec_string_free(a);
        bec_string_free(b);
        bec_ensemble_free(e);
        bec_ensemble_free(back);
        bec_ensemble_free(again);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let mut d = ptr::null_mut();
        let s = bec_design_eps(RHO6.0.as_ptr(), RHO6.1.as_ptr(), 1, 0.1, BecDesignKind::TypeA, 0, &mut d);
        assert_eq!(s, BecStatus::Infeasible);
        assert!(last_error().contains("0.2"), "{}", last_error());
        assert!(d.is_null());

        let s = bec_design_rate(RHO6.0.as_ptr(), RHO6.1.as_ptr(), 1, 0.5, BecDesignKind::TypeB, 40, &mut d);
        assert_eq!(s, BecStatus::InvalidArgument);

        let bad = CString::new("{not json").unwrap();
        let mut e = ptr::null_mut();
        assert_eq!(bec_ensemble_from_json(bad.as_ptr(), &mut e), BecStatus::Parse);
        let missing = CString::new("/nonexistent/e.json").unwrap();
        assert_eq!(bec_ensemble_load(missing.as_ptr(), &mut e), BecStatus::Io);
        assert_eq!(bec_ensemble_from_json(ptr::null(), &mut e), BecStatus::NullPointer);
        let mut rate = 0.0;
        assert_eq!(bec_ensemble_rate(ptr::null(), &mut rate), BecStatus::NullPointer);

        let (ld, lc) = ([2u32, 3], [0.7, 0.7]);
        let s = bec_ensemble_new(ld.as_ptr(), lc.as_ptr(), 2, RHO6.0.as_ptr(), RHO6.1.as_ptr(), 1, &mut e);
        assert_eq!(s, BecStatus::InvalidArgument);
        bec_ensemble_free(ptr::null_mut());
        bec_design_free(ptr::null_mut());
    }
}

#[test]
fn taylor_and_bounds() {
    let mut t = [0.0; 4];
    unsafe {
        assert_eq!(bec_taylor(RHO6.0.as_ptr(), RHO6.1.as_ptr(), 1, t.as_mut_ptr(), 4), BecStatus::Ok);
    }
    assert!((t[0] - 0.2).abs() < 1e-15);
    assert!((t[1] - 0.08).abs() < 1e-15);
    let (mut tb, mut rb) = (0.0, 0.0);
    unsafe {
        assert_eq!(bec_bounds(0.5, 0.48, 6.0, &mut tb, &mut rb), BecStatus::Ok);
        assert!((tb - 0.5 * (1.0 - 0.5f64.powi(6))).abs() < 1e-15);
        assert!(rb > 0.5 && rb < 0.52);
        assert_eq!(bec_bounds(0.5, 0.48, 1.0, &mut tb, ptr::null_mut()), BecStatus::InvalidArgument);
    }
}

#[test]
fn header_declares_api() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/bec_design.h")).unwrap();
    for name in [
        "typedef struct BecEnsemble BecEnsemble",
        "typedef struct BecDesign BecDesign",
        "BEC_STATUS_OK = 0",
        "BEC_DESIGN_KIND_TYPE_MB",
        "bec_last_error_message",
        "bec_ensemble_new",
        "bec_ensemble_from_json",
        "bec_ensemble_load",
        "bec_ensemble_save",
        "bec_ensemble_to_json",
        "bec_ensemble_check",
        "bec_ensemble_threshold",
        "bec_design_eps",
        "bec_design_rate",
        "bec_design_info",
        "bec_taylor",
        "bec_bounds",
        "bec_string_free",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }

    // compile a C translation unit against the header when a compiler exists
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        return;
    };
    if !cc.status.success() {
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"bec_design.h\"\n\
         int use(void) {\n\
           BecEnsemble *e = NULL;\n\
           BecStatus s = bec_ensemble_from_json(\"{}\", &e);\n\
           bool ok = false;\n\
           if (s == BEC_STATUS_OK) { bec_ensemble_check(e, 0.4, &ok, NULL); bec_ensemble_free(e); }\n\
           return (int)ok;\n\
         }\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
