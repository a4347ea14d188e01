use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use sfvem_ffi::*;

fn last_error() -> String {
    let p = sfvem_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn mesh_handle_round_trip() {
    let family = CString::new("irregular8").unwrap();
    let mut mesh = ptr::null_mut();
    unsafe {
        assert_eq!(sfvem_mesh_generate(family.as_ptr(), 2, &mut mesh), SfvemStatus::Ok);
        assert!(sfvem_last_error().is_null());
        let (mut nv, mut nt) = (0, 0);
        assert_eq!(sfvem_mesh_sizes(mesh, &mut nv, &mut nt), SfvemStatus::Ok);
        assert_eq!(nt, 32);
        let mut coords = vec![0.0; 2 * nv];
        let mut tris = vec![0usize; 3 * nt];
        assert_eq!(sfvem_mesh_copy(mesh, coords.as_mut_ptr(), coords.len(), tris.as_mut_ptr(), tris.len()), SfvemStatus::Ok);
        assert!(coords.iter().all(|&c| (0.0..=1.0).contains(&c)));
        assert!(tris.iter().all(|&i| i < nv));
        // short buffers are rejected rather than overrun
        assert_eq!(
            sfvem_mesh_copy(mesh, coords.as_mut_ptr(), 1, tris.as_mut_ptr(), tris.len()),
            SfvemStatus::InvalidArgument
        );
        sfvem_mesh_free(mesh);
    }
}

#[test]
fn run_reports_rows_and_csv() {
    let cfg = CString::new("method = sf-hct\nk = 2\nmesh = uniform\nlevels = 1..3\nkappa = true\n").unwrap();
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(sfvem_run(cfg.as_ptr(), &mut report), SfvemStatus::Ok);
        let mut n = 0;
        assert_eq!(sfvem_report_len(report, &mut n), SfvemStatus::Ok);
        assert_eq!(n, 3);
        let mut row = std::mem::zeroed::<SfvemRow>();
        assert_eq!(sfvem_report_row(report, 2, &mut row), SfvemStatus::Ok);
        assert_eq!(row.level, 3);
        assert!(row.l2_order > 2.5 && row.h1_order > 1.5);
        assert!(row.kappa > 1.0);
        assert_eq!(sfvem_report_row(report, 3, &mut row), SfvemStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));

        let mut csv = ptr::null_mut();
        assert_eq!(sfvem_report_csv(report, &mut csv), SfvemStatus::Ok);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        sfvem_string_free(csv);
        assert_eq!(text.lines().count(), 4);
        sfvem_report_free(report);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut report = ptr::null_mut();
    let mut mesh = ptr::null_mut();
    let cases = [
        ("k = 9\n", SfvemStatus::UnsupportedDegree),
        ("method = nope\n", SfvemStatus::InvalidArgument),
        ("levels = 40\n", SfvemStatus::InvalidLevel),
        ("out = /tmp/x.csv\n", SfvemStatus::InvalidArgument),
    ];
    unsafe {
        for (text, status) in cases {
            let cfg = CString::new(text).unwrap();
            assert_eq!(sfvem_run(cfg.as_ptr(), &mut report), status, "{text}");
            assert!(!last_error().is_empty());
        }
        assert_eq!(sfvem_run(ptr::null(), &mut report), SfvemStatus::NullPointer);
        let family = CString::new("hexagons").unwrap();
        assert_eq!(sfvem_mesh_generate(family.as_ptr(), 1, &mut mesh), SfvemStatus::InvalidArgument);
        assert_eq!(sfvem_mesh_sizes(ptr::null(), ptr::null_mut(), ptr::null_mut()), SfvemStatus::NullPointer);
        // freeing NULL is a no-op
        sfvem_mesh_free(ptr::null_mut());
        sfvem_report_free(ptr::null_mut());
        sfvem_string_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = include.join("sfvem.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["sfvem_run", "sfvem_mesh_generate", "sfvem_report_row", "SFVEM_STATUS_OK", "typedef struct SfvemMesh SfvemMesh"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = std::env::temp_dir().join(format!("sfvem-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"sfvem.h\"\nint main(void) {\n  SfvemReport *r = 0;\n  SfvemStatus s = sfvem_run(\"k=1\", &r);\n  sfvem_report_free(r);\n  return s == SFVEM_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    let Ok(out) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler available; header syntax not checked");
        return;
    };
    std::fs::remove_dir_all(&dir).ok();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
