//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use loforge::verify;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in 1..=10u8 {
        match verify::run(id) {
            Ok(o) => {
                println!("{}", o.line());
                if !o.pass {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("criterion {id:>2} [FAIL] {}: error {e}", verify::TITLES[id as usize - 1]);
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
