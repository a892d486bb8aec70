use dnls_core::Nonlinearity;
use dnls_harness::config::ExperimentConfig;
use dnls_harness::HarnessError;

fn load(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("c.toml");
    std::fs::write(&path, text).unwrap();
    let cfg = ExperimentConfig::load(&path)?;
    cfg.validate()?;
    Ok(cfg)
}

#[test]
fn partial_file_falls_back_to_defaults() {
    let cfg = load(
        r#"
h_list = [0.1, 0.05]
T = 0.5
sign = "focusing"

[psi]
family = "sech"
amplitude = 1.5
width = 0.7
"#,
    )
    .unwrap();
    assert_eq!(cfg.h_list, vec![0.1, 0.05]);
    assert_eq!(cfg.t_end, 0.5);
    assert_eq!(cfg.nonlinearity(), Nonlinearity::Focusing);
    assert_eq!(cfg.gamma, ExperimentConfig::default().gamma);
    assert_eq!(cfg.phi, ExperimentConfig::default().phi);
    assert_eq!(cfg.snapshot_times().len(), cfg.snapshot_count);
}

#[test]
fn invalid_configs_are_config_errors() {
    let cases = [
        ("h_list = [0.05, 0.1]", "decreasing"),
        ("h_list = [0.25]", "h0"),
        ("h_list = [0.3]", "h0"),
        ("h_list = [0.15]", "power of two"),
        ("gamma = 1.0", "gamma"),
        ("T = -1.0", "T"),
        ("dt = 0.75", "dt"),
        ("snapshot_count = 1", "snapshot"),
        ("m_ref = 3000", "power"),
        ("sign = \"sideways\"", "sideways"),
        ("no_such_key = 1", "no_such_key"),
        ("[acl]\nkappas = [3.0]", "kappa"),
        ("[psi]\nfamily = \"gaussian\"\nwidth = -1.0", "width"),
    ];
    for (text, needle) in cases {
        match load(text) {
            Err(e @ HarnessError::Config(_)) => {
                assert_eq!(e.exit_code(), 2);
                assert!(
                    e.to_string()
                        .to_lowercase()
                        .contains(&needle.to_lowercase()),
                    "{text}: {e}"
                );
            }
            other => panic!("{text}: expected a config error, got {other:?}"),
        }
    }
}

#[test]
fn hash_tracks_content() {
    let a = ExperimentConfig::default();
    let mut b = a.clone();
    assert_eq!(a.hash(), b.hash());
    b.seed = 7;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}
