//! One line per acceptance criterion; exits non-zero if any line is FAIL.

use edgestat::reproduce::Reproduction;
use edgestat_core::Caps;

fn main() {
    let mut rep = Reproduction::new(Caps::default());
    let mut failed = Vec::new();
    for id in 1..=9 {
        match rep.criterion(id) {
            Ok(outcome) => {
                println!("{outcome}");
                if !outcome.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("criterion {id} [FAIL] error: {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
