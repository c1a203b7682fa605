use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/infomarket.h")).unwrap();
    let source = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .filter_map(|rest| rest.split('(').next())
        .collect();
    assert!(exported.len() >= 10);
    for name in exported {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct ImMarkets ImMarkets;"));
    assert!(header.contains("IM_STATUS_OK = 0"));
}

fn static_lib() -> Option<PathBuf> {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libinfomarket_ffi.a");
    lib.exists().then_some(lib)
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include "infomarket.h"

int main(void) {
    double p = 0.0;
    if (im_event_probability(4, 1, 2, &p) != IM_STATUS_OK || p != 0.75) return 1;
    if (im_log_likelihood(2.0, &p) != IM_STATUS_INVALID_ARGUMENT) return 2;
    if (im_last_error_message() == NULL) return 3;
    ImMarkets *m = NULL;
    if (im_markets_simulate(20, 1, 3, 1, &m) != IM_STATUS_OK) return 4;
    ImCurve *c = NULL;
    if (im_score_curve(m, &c) != IM_STATUS_OK) return 5;
    int64_t off; double score; size_t n;
    if (im_curve_point(c, im_curve_len(c) - 1, &off, &score, &n) != IM_STATUS_OK) return 6;
    if (off != 0 || score != 0.0 || n != 3) return 7;
    im_curve_free(c);
    im_markets_free(m);
    printf("ok\n");
    return 0;
}
"#;

fn cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
}

#[test]
fn c_program_compiles_and_runs() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = crate_dir().join("include");

    let syntax = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    let Some(lib) = static_lib() else {
        eprintln!("static library not built; link step skipped");
        return;
    };
    let exe = dir.path().join("main");
    let link = Command::new(cc)
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(Path::new(&exe)).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
