#![allow(dead_code)]

use stardeform::matrix::StarMatrix;
use stardeform::parse::parse_series;
use stardeform::star::StarAlgebra;

/// Compares against committed values; `STARDEFORM_BLESS=1` rewrites them.
pub fn check_golden(alg: &StarAlgebra, m: &StarMatrix, name: &str) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("STARDEFORM_BLESS").is_some() {
        let rendered: Vec<String> = m.entries().iter().map(|e| e.to_string()).collect();
        std::fs::write(&path, serde_json::to_string_pretty(&rendered).unwrap() + "\n").unwrap();
    }
    let stored: Vec<String> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let entries = stored.iter().map(|s| parse_series(s, alg.ring(), alg.order()).unwrap()).collect();
    let golden = StarMatrix::new(m.rows(), m.cols(), entries).unwrap();
    assert_eq!(m.first_difference(&golden).unwrap(), None, "{name}");
}
