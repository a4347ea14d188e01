//! C interface: opaque mesh and report handles, integer status codes and a
//! thread-local last-error message.
//!
//! Every function returns an [`SfvemStatus`]; outputs go through pointers.
//! Handles are released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sfvem::experiment::{run_experiment, ErrorReport, RunConfig};
use sfvem::mesh::{MeshFamily, TriangleMesh};
use sfvem::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfvemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedDegree = 3,
    InvalidLevel = 4,
    NotPositiveDefinite = 5,
    NoConvergence = 6,
    Numerical = 7,
    Io = 8,
    Panic = 9,
}

/// Generated mesh.
pub struct SfvemMesh(TriangleMesh);

/// Result of a convergence study.
pub struct SfvemReport(ErrorReport);

/// One level of a report. `kappa` is NaN when it was not requested.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfvemRow {
    pub level: usize,
    pub dofs: usize,
    pub l2: f64,
    pub l2_order: f64,
    pub h1: f64,
    pub h1_order: f64,
    pub kappa: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SfvemStatus {
    match e {
        Error::UnsupportedDegree { .. } | Error::HarmonicDegree { .. } | Error::UnsupportedQuadrature(_) => {
            SfvemStatus::UnsupportedDegree
        }
        Error::InvalidLevel { .. } => SfvemStatus::InvalidLevel,
        Error::NotPositiveDefinite(_) => SfvemStatus::NotPositiveDefinite,
        Error::NoConvergence { .. } => SfvemStatus::NoConvergence,
        Error::SingularLocal(_) | Error::DofMap(_) | Error::Dimension(_) | Error::TriangleIndex { .. } => {
            SfvemStatus::Numerical
        }
        Error::Config(_) => SfvemStatus::InvalidArgument,
        Error::Io(_) => SfvemStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SfvemStatus, String)>) -> SfvemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SfvemStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SfvemStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SfvemStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SfvemStatus, String) {
    (SfvemStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SfvemStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SfvemStatus::InvalidArgument, format!("`{what}` is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sfvem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Generates level `level` of a mesh family (`"uniform"` or `"irregular8"`).
///
/// # Safety
/// `family` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sfvem_mesh_generate(family: *const c_char, level: usize, out: *mut *mut SfvemMesh) -> SfvemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let family: MeshFamily = read_str(family, "family")?.parse().map_err(lib_err)?;
        let mesh = family.generate(level).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SfvemMesh(mesh)));
        Ok(())
    })
}

/// # Safety
/// `mesh` must come from [`sfvem_mesh_generate`] and not be freed yet; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sfvem_mesh_free(mesh: *mut SfvemMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Vertex and triangle counts.
///
/// # Safety
/// `mesh` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sfvem_mesh_sizes(mesh: *const SfvemMesh, vertices: *mut usize, triangles: *mut usize) -> SfvemStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        if vertices.is_null() || triangles.is_null() {
            return Err(null("output"));
        }
        *vertices = m.0.num_vertices();
        *triangles = m.0.num_triangles();
        Ok(())
    })
}

/// Copies vertex coordinates as `x0 y0 x1 y1 ...` into `coords` (length `2 * vertices`)
/// and triangle vertex indices into `tris` (length `3 * triangles`).
///
/// # Safety
/// `mesh` must be a live handle and the buffers at least `len` entries long.
#[no_mangle]
pub unsafe extern "C" fn sfvem_mesh_copy(
    mesh: *const SfvemMesh,
    coords: *mut f64,
    coords_len: usize,
    tris: *mut usize,
    tris_len: usize,
) -> SfvemStatus {
    guard(|| {
        let m = &mesh.as_ref().ok_or_else(|| null("mesh"))?.0;
        if coords.is_null() || tris.is_null() {
            return Err(null("buffer"));
        }
        if coords_len < 2 * m.num_vertices() || tris_len < 3 * m.num_triangles() {
            return Err((SfvemStatus::InvalidArgument, "buffer too small".into()));
        }
        let c = std::slice::from_raw_parts_mut(coords, coords_len);
        for (i, v) in m.vertices.iter().enumerate() {
            c[2 * i] = v[0];
            c[2 * i + 1] = v[1];
        }
        let t = std::slice::from_raw_parts_mut(tris, tris_len);
        for (i, tri) in m.triangles.iter().enumerate() {
            t[3 * i..3 * i + 3].copy_from_slice(tri);
        }
        Ok(())
    })
}

/// Runs a convergence study against the sine solution. `config` holds
/// `key=value` lines (`method`, `k`, `mesh`, `levels`, `alpha`, `dof-mode`,
/// `harmonic-degrees`, `source`, `kappa`, `tol`, `solver`); unset keys keep
/// their defaults. Timing is off unless `timing=true` is given.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sfvem_run(config: *const c_char, out: *mut *mut SfvemReport) -> SfvemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(config, "config")?;
        let base = RunConfig { timing: false, ..RunConfig::default() };
        let cfg = RunConfig::parse_text(text, base).map_err(lib_err)?;
        if cfg.out.is_some() || cfg.dump_matrix.is_some() {
            return Err((SfvemStatus::InvalidArgument, "file outputs are not available through this interface".into()));
        }
        let report = run_experiment(&cfg).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SfvemReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`sfvem_run`] and not be freed yet; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sfvem_report_free(report: *mut SfvemReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle and `rows` writable.
#[no_mangle]
pub unsafe extern "C" fn sfvem_report_len(report: *const SfvemReport, rows: *mut usize) -> SfvemStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if rows.is_null() {
            return Err(null("rows"));
        }
        *rows = r.0.rows.len();
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle and `row` writable.
#[no_mangle]
pub unsafe extern "C" fn sfvem_report_row(report: *const SfvemReport, index: usize, row: *mut SfvemRow) -> SfvemStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        if row.is_null() {
            return Err(null("row"));
        }
        let x = r
            .rows
            .get(index)
            .ok_or_else(|| (SfvemStatus::InvalidArgument, format!("row {index} out of range ({} rows)", r.rows.len())))?;
        *row = SfvemRow {
            level: x.level,
            dofs: x.dofs,
            l2: x.l2,
            l2_order: x.l2_order,
            h1: x.h1,
            h1_order: x.h1_order,
            kappa: x.kappa.map_or(f64::NAN, |k| k.kappa),
        };
        Ok(())
    })
}

/// The report as CSV; release with [`sfvem_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sfvem_report_csv(report: *const SfvemReport, out: *mut *mut c_char) -> SfvemStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(r.0.to_csv()).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed yet; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sfvem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
