use std::path::Path;
use std::process::Command;

// The generated header has to compile as C and as C++.
#[test]
fn header_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qmassey.h");
    assert!(header.exists(), "header not generated");
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let out = match Command::new(cc).args(["-fsyntax-only", "-x", lang]).arg(&header).output() {
            Ok(o) => o,
            Err(_) => {
                eprintln!("{cc} not available, skipping");
                continue;
            }
        };
        assert!(out.status.success(), "{cc}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
