// Kept in its own test binary: the environment is shared by every test in a
// process.

use ramanujan_cli::{run_with, CONFIG_ENV, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK};

fn code(args: &[&str]) -> i32 {
    let mut argv = vec!["ramanujan-cloud"];
    argv.extend_from_slice(args);
    run_with(argv, &mut Vec::new(), &mut Vec::new())
}

#[test]
fn config_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let tiny = dir.path().join("tiny.json");
    std::fs::write(&tiny, r#"{"series_q": 64, "exotic_q": 64, "sample_b": [1, 2], "corroboration_a": [1]}"#).unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"nonsense": true}"#).unwrap();

    std::env::set_var(CONFIG_ENV, &tiny);
    assert_eq!(code(&["--strict", "verdict", "GR"]), EXIT_INCONCLUSIVE);

    // the flag wins over the environment
    std::env::set_var(CONFIG_ENV, &broken);
    assert_eq!(code(&["csum", "6", "3"]), EXIT_INPUT);
    assert_eq!(code(&["--config", tiny.to_str().unwrap(), "csum", "6", "3"]), EXIT_OK);

    std::env::remove_var(CONFIG_ENV);
    assert_eq!(code(&["csum", "6", "3"]), EXIT_OK);
}
