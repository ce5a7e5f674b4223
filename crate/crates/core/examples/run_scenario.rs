//! Drive the command runner from code: every command on the reference
//! scenario, written into a temporary directory.

use optomech::commands::{run_command, Command};
use optomech::scenario::load_scenario;

fn main() -> optomech::Result<()> {
    let scenario = load_scenario(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/paper.cfg"))?;
    let root = std::env::temp_dir().join("optomech-run-scenario");
    for command in [Command::Budget, Command::Cool, Command::Scan] {
        let outcome = run_command(&scenario, command, root.join(command.name()))?;
        println!("{command}: {} files", outcome.entries.len());
        for e in &outcome.entries {
            println!("  {:<28} {:>8} bytes  {}", e.file, e.bytes, &e.sha256[..12]);
        }
    }
    let cooling = std::fs::read_to_string(root.join("cool/cooling_summary.csv")).expect("written above");
    print!("{cooling}");
    Ok(())
}
