//! Writes the bundled code and network files.
//!
//! Usage: `cargo run --example export_networks -- <dir>`

use std::fs;
use std::path::Path;

use qwe_core::code::library;
use qwe_core::network::builders::surface_code;
use qwe_core::{StabilizerGroup, WeightScheme};

fn write(dir: &Path, name: &str, value: &impl serde::Serialize) {
    let text = serde_json::to_string_pretty(value).unwrap() + "\n";
    fs::write(dir.join(name), text).unwrap();
}

fn encoding_state(g: StabilizerGroup) -> StabilizerGroup {
    g.encoding_state(&g.logical_operators()).unwrap()
}

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    let dir = Path::new(&dir);
    fs::create_dir_all(dir.join("codes")).unwrap();
    fs::create_dir_all(dir.join("networks")).unwrap();

    let codes: Vec<(&str, StabilizerGroup)> = vec![
        ("five_qubit", library::five_qubit()),
        ("four_two_two", library::four_two_two()),
        ("steane", library::steane()),
        ("bell", library::bell()),
        ("zero_state", library::zero_state()),
        ("five_one_two", library::five_one_two()),
        ("bacon_shor_lego", library::bacon_shor_lego()),
        ("qutrit_three", library::qutrit_three()),
        ("trivial_qubit", StabilizerGroup::trivial(2, 1).unwrap()),
        ("six_zero_four", encoding_state(library::five_qubit())),
        ("six_zero_three", encoding_state(library::four_two_two())),
    ];
    for (name, g) in &codes {
        let frame = g.logical_operators();
        write(&dir.join("codes"), &format!("{name}.json"), &g.to_json(Some(&frame)));
    }

    let surface = surface_code(4, 4, WeightScheme::shor_laflamme(2)).unwrap();
    let mut file = surface.to_file();
    write(&dir.join("networks"), "surface_25.json", &file);
    // one top boundary leg capped with |+⟩ instead of |0⟩
    let cap = file.legos.iter_mut().find(|l| l.id == "b0_2_ne").unwrap();
    cap.code.stabilizers[0].paulis = "X".into();
    write(&dir.join("networks"), "surface_25_perturbed.json", &file);
    for n in [10, 30, 150] {
        let strip = surface_code(3, n, WeightScheme::double(2)).unwrap();
        write(&dir.join("networks"), &format!("strip_3x{n}.json"), &strip.to_file());
    }
}
