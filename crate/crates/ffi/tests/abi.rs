use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use homosyntax::generate::{generate, GenerateOptions, Model};
use homosyntax_ffi::*;

fn resource_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/resources")
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = hs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Handle(*mut HsResources);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { hs_resources_free(self.0) }
    }
}

fn load() -> Handle {
    let dir = c(resource_dir().to_str().unwrap());
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hs_resources_load(dir.as_ptr(), &mut h) }, HsStatus::Ok);
    assert!(!h.is_null());
    Handle(h)
}

unsafe fn take(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    hs_string_free(p);
    s
}

#[test]
fn generate_matches_library() {
    let h = load();
    let q = c("sol");
    let mut opts = hs_generate_options_default();
    opts.length = 6;
    opts.seed = 3;
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hs_generate(h.0, q.as_ptr(), &opts, &mut out) }, HsStatus::Ok);
    let text = unsafe { take(out) };
    assert_eq!(text, "Aquella arena inmensa navega siempre.");

    let res = homosyntax::Resources::load_dir(&resource_dir()).unwrap();
    for model in 1..=3u8 {
        opts.model = model;
        let mut out = ptr::null_mut();
        let status = unsafe { hs_generate(h.0, q.as_ptr(), &opts, &mut out) };
        let direct = generate(Model::try_from(model).unwrap(), "sol", 6, &res, 3, &GenerateOptions::default());
        match direct {
            Ok(g) => assert_eq!(unsafe { take(out) }, g.text),
            Err(_) => assert_ne!(status, HsStatus::Ok),
        }
    }
}

#[test]
fn trace_is_json_with_slots() {
    let h = load();
    let q = c("mar");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hs_generate_trace(h.0, q.as_ptr(), ptr::null(), &mut out) }, HsStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&unsafe { take(out) }).unwrap();
    assert_eq!(v["tokens"].as_array().unwrap().len(), 8);
    assert!(!v["trace"].as_array().unwrap().is_empty());
}

#[test]
fn proximity_and_neighbors() {
    let h = load();
    let (a, b) = (c("rey"), c("reina"));
    let mut p = -1.0;
    assert_eq!(unsafe { hs_proximity(h.0, a.as_ptr(), b.as_ptr(), &mut p) }, HsStatus::Ok);
    assert!((0.0..=1.0).contains(&p));
    let mut same = 0.0;
    assert_eq!(unsafe { hs_proximity(h.0, a.as_ptr(), a.as_ptr(), &mut same) }, HsStatus::Ok);
    assert_eq!(same, 1.0);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hs_neighbors_json(h.0, a.as_ptr(), 5, &mut out) }, HsStatus::Ok);
    let list: Vec<(String, f64)> = serde_json::from_str(&unsafe { take(out) }).unwrap();
    assert_eq!(list.len(), 5);
    assert!(list.windows(2).all(|w| w[0].1 >= w[1].1));
}

#[test]
fn failures_set_status_and_message() {
    let missing = c("/nonexistent/resources");
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hs_resources_load(missing.as_ptr(), &mut h) }, HsStatus::Io);
    assert!(h.is_null());
    assert!(last_error().contains("/nonexistent/resources"));

    let h = load();
    assert!(hs_last_error().is_null(), "success clears the message");
    let mut out = ptr::null_mut();
    let oov = c("zzzz");
    assert_eq!(unsafe { hs_generate(h.0, oov.as_ptr(), ptr::null(), &mut out) }, HsStatus::Oov);
    assert!(out.is_null());
    assert!(last_error().contains("zzzz"));

    let q = c("sol");
    let mut opts = hs_generate_options_default();
    opts.length = 40;
    assert_eq!(unsafe { hs_generate(h.0, q.as_ptr(), &opts, &mut out) }, HsStatus::Config);
    opts = hs_generate_options_default();
    opts.model = 9;
    assert_eq!(unsafe { hs_generate(h.0, q.as_ptr(), &opts, &mut out) }, HsStatus::Config);

    assert_eq!(unsafe { hs_generate(ptr::null(), q.as_ptr(), ptr::null(), &mut out) }, HsStatus::InvalidArgument);
    assert_eq!(unsafe { hs_generate(h.0, ptr::null(), ptr::null(), &mut out) }, HsStatus::InvalidArgument);
    assert_eq!(unsafe { hs_generate(h.0, q.as_ptr(), ptr::null(), ptr::null_mut()) }, HsStatus::InvalidArgument);
    let bad = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { hs_generate(h.0, bad.as_ptr().cast(), ptr::null(), &mut out) },
        HsStatus::InvalidArgument
    );
    unsafe {
        hs_string_free(ptr::null_mut());
        hs_resources_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(hs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/homosyntax.h")).unwrap();
    for name in [
        "hs_resources_load",
        "hs_resources_free",
        "hs_generate_options_default",
        "hs_generate(",
        "hs_generate_trace",
        "hs_proximity",
        "hs_neighbors_json",
        "hs_string_free",
        "hs_last_error",
        "hs_version",
        "typedef struct HsResources HsResources",
        "HS_STATUS_OOV = 5",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles a C program against the header and the shared library, when a C
/// compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = std::env::var("CC").or_else(|_| which("cc").ok_or(())) else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    // integration tests live in target/<profile>/deps; the cdylib one level up
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    if !lib_dir.join("libhomosyntax_ffi.so").exists() {
        eprintln!("shared library not found in {}; skipping", lib_dir.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "homosyntax.h"
int main(int argc, char **argv) {
    HsResources *h = NULL;
    if (hs_resources_load(argv[1], &h) != HS_STATUS_OK) { fprintf(stderr, "%s\n", hs_last_error()); return 2; }
    HsGenerateOptions o = hs_generate_options_default();
    o.length = 6; o.seed = 3;
    char *text = NULL;
    HsStatus s = hs_generate(h, "sol", &o, &text);
    if (s != HS_STATUS_OK) { fprintf(stderr, "%s\n", hs_last_error()); return 3; }
    printf("%s\n", text);
    hs_string_free(text);
    s = hs_generate(h, "zzzz", &o, &text);
    hs_resources_free(h);
    return s == HS_STATUS_OOV ? 0 : 4;
}
"#,
    )
    .unwrap();
    let exe = tmp.path().join("main");
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lhomosyntax_ffi")
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe)
        .arg(resource_dir())
        .env("LD_LIBRARY_PATH", &lib_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "Aquella arena inmensa navega siempre.\n");
}

fn which(name: &str) -> Option<String> {
    std::env::var_os("PATH")?
        .to_str()?
        .split(':')
        .map(|d| Path::new(d).join(name))
        .find(|p| p.is_file())
        .map(|p| p.display().to_string())
}
