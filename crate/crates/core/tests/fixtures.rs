use mcr_core::fixtures;
use mcr_core::io::{emit_game, parse_game, InstanceFile};
use mcr_core::microgrid::GridInstance;

fn read(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn game_fixtures_round_trip() {
    for name in ["fig1.json", "fig2.json", "example2.json"] {
        let text = read(name);
        let g = parse_game(&text).unwrap();
        assert_eq!(emit_game(&g), text, "{name}");
    }
}

#[test]
fn game_fixtures_match_builders() {
    for (name, g) in [
        ("fig1.json", fixtures::fig1()),
        ("fig2.json", fixtures::fig2()),
        ("example2.json", fixtures::example2()),
    ] {
        assert_eq!(emit_game(&g), read(name), "{name}");
    }
}

#[test]
fn instance_fixture_round_trips() {
    let text = read("example31.json");
    let inst = InstanceFile::parse(&text).unwrap();
    assert_eq!(inst, GridInstance::example());
    assert_eq!(InstanceFile::emit(&inst), text);
}
