use motive_series::verify::run_default;

#[test]
fn only_the_semigroup_identity_fails_on_several_branches() {
    let checks = run_default().unwrap();
    for c in &checks {
        println!("{c}");
    }
    let failed: Vec<(&str, &str)> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| (c.name, c.fixture.as_str()))
        .collect();
    assert_eq!(
        failed,
        vec![("identity-Phat", "lines"), ("identity-Phat", "C"), ("identity-Phat", "C'")]
    );
}
