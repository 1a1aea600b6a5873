//! No completion within the bounds: the verdict is `Unsat`, exit code 1.

use oosketch::pipeline::synthesize_sources;
use oosketch::Error;

pub fn main() {
    let src = "class Odd { harness static void h() { int x = ??; assert x + x == 7; } }";
    let err = synthesize_sources(&[("Odd.java", src)], &Default::default(), &mut Default::default()).unwrap_err();
    println!("{err} (exit code {})", err.exit_code());
    assert!(matches!(err, Error::Unsat { .. }));
    assert_eq!(err.exit_code(), 1);
}
