//! Runs every example; `cargo test` builds them into `target/<profile>/examples`.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 6] = ["graded_algebra", "master_equation", "pushforward", "relaxed", "gravity_fiber", "ultralocal"];

fn examples_dir() -> PathBuf {
    // target/<profile>/deps/<this test> -> target/<profile>/examples
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().join("examples")
}

#[test]
fn examples_run_cleanly() {
    let dir = examples_dir();
    for name in EXAMPLES {
        let path = dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
        assert!(path.exists(), "{} not built", path.display());
        let out = Command::new(&path).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
}
